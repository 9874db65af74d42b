//! Monte Carlo estimate of `E max_pi R_pi` in the annealed and quenched
//! settings, compared against `n g(1/n)` and the one-term growth formulas.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma_models::{costs_with_gamma, sample_cost, CostModel, GammaMatrix, GammaModel};
use crate::matching::solve_max_assignment;
use crate::numeric::summation::mean_and_std_error;
use crate::quantile::{predicted_max, tail_probability};
use crate::report::{ExperimentReport, ReportRow};
use crate::rng::{stream, StreamPurpose};

/// Smallest order accepted by [`asymptotic_prediction`]; `ln ln n > 0` from here on.
pub const ASYMPTOTIC_MIN_N: usize = 3;
/// Minimum sample count for [`tail_check`].
pub const TAIL_CHECK_MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Fresh `gamma` and `h` for every replicate.
    Annealed,
    /// One `gamma` matrix per `n`, frozen across replicates.
    Quenched,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Annealed => "annealed",
            Mode::Quenched => "quenched",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "annealed" => Ok(Mode::Annealed),
            "quenched" => Ok(Mode::Quenched),
            _ => Err(Error::Report(format!(
                "unknown mode '{s}', expected annealed or quenched"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: GammaModel,
    /// Matrix orders, strictly increasing, each >= 2.
    pub sizes: Vec<usize>,
    /// Replicates per order; at least 2.
    pub replicates: usize,
    pub mode: Mode,
    pub master_seed: u64,
    /// Upper bound on concurrently running replicates.
    pub parallelism: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.sizes.is_empty() {
            return Err(Error::Config("sizes must not be empty".into()));
        }
        if self.sizes[0] < 2 {
            return Err(Error::Config(format!(
                "sizes must be >= 2, got {}",
                self.sizes[0]
            )));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sizes must be strictly increasing".into()));
        }
        if self.replicates < 2 {
            return Err(Error::Config(format!(
                "replicates must be >= 2, got {}",
                self.replicates
            )));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be >= 1".into()));
        }
        Ok(())
    }
}

/// One-term growth of `E max`: `n ln ln n` (constant and uniform),
/// `2 n ln ln n` (exponential), `n ln n / (alpha - 1)` (polynomial tail).
pub fn asymptotic_prediction(model: &GammaModel, n: usize) -> Result<f64> {
    if n < ASYMPTOTIC_MIN_N {
        return Err(Error::Domain(format!(
            "one-term asymptotics need n >= {ASYMPTOTIC_MIN_N}, got {n}"
        )));
    }
    model.validate()?;
    let nf = n as f64;
    let loglog = nf.ln().ln();
    match *model {
        GammaModel::Constant(_) | GammaModel::Uniform01 => Ok(nf * loglog),
        GammaModel::StdExponential => Ok(2.0 * nf * loglog),
        GammaModel::PolynomialTail { alpha } => Ok(nf * nf.ln() / (alpha - 1.0)),
        GammaModel::UserDensity(_) => Err(Error::Unsupported("one-term asymptotics")),
    }
}

fn relative_error(predicted: f64, empirical: f64) -> f64 {
    (predicted - empirical).abs() / empirical
}

fn run_replicate(
    config: &ExperimentConfig,
    n: usize,
    k: usize,
    frozen: Option<&GammaMatrix>,
) -> Result<f64> {
    let (seed, n64, k64) = (config.master_seed, n as u64, k as u64);
    let sampled;
    let gammas = match frozen {
        Some(g) => g,
        None => {
            let mut rng = stream(seed, n64, k64, StreamPurpose::AnnealedGamma);
            sampled = GammaMatrix::sample(&config.model, n, &mut rng)?;
            &sampled
        }
    };
    let mut fading = stream(seed, n64, k64, StreamPurpose::Fading);
    let costs = costs_with_gamma(gammas, &mut fading)?;
    Ok(solve_max_assignment(&costs)?.value)
}

/// Runs every size in `config.sizes`. Replicate `k` at order `n` uses
/// streams keyed by `(master_seed, n, k)`, and results are aggregated in
/// replicate order, so the report does not depend on `parallelism`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let mut rows = Vec::with_capacity(config.sizes.len());
    for &n in &config.sizes {
        let frozen = match config.mode {
            Mode::Quenched => {
                let mut rng = stream(
                    config.master_seed,
                    n as u64,
                    0,
                    StreamPurpose::QuenchedGamma,
                );
                Some(GammaMatrix::sample(&config.model, n, &mut rng)?)
            }
            Mode::Annealed => None,
        };
        let outcomes: Vec<Result<f64>> = pool.install(|| {
            (0..config.replicates)
                .into_par_iter()
                .map(|k| run_replicate(config, n, k, frozen.as_ref()))
                .collect()
        });
        let mut optima = Vec::with_capacity(outcomes.len());
        for (k, outcome) in outcomes.into_iter().enumerate() {
            optima.push(outcome.map_err(|e| Error::Replicate {
                n,
                replicate: k,
                source: Box::new(e),
            })?);
        }
        let (empirical_mean, std_error) =
            mean_and_std_error(&optima).expect("at least two replicates");
        let predicted_numeric = predicted_max(&config.model, n)?;
        let predicted_asymptotic = match asymptotic_prediction(&config.model, n) {
            Ok(v) => v,
            Err(Error::Unsupported(_)) => f64::NAN,
            Err(Error::Domain(_)) if n < ASYMPTOTIC_MIN_N => f64::NAN,
            Err(e) => return Err(e),
        };
        rows.push(ReportRow {
            n,
            empirical_mean,
            std_error,
            predicted_numeric,
            predicted_asymptotic,
            rel_err_numeric: relative_error(predicted_numeric, empirical_mean),
            rel_err_asymptotic: relative_error(predicted_asymptotic, empirical_mean),
        });
    }
    Ok(ExperimentReport {
        model: config.model.to_string(),
        mode: config.mode,
        replicates: config.replicates,
        seed: config.master_seed,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub n: usize,
    pub empirical_mean: f64,
    pub predicted_numeric: f64,
    pub predicted_asymptotic: f64,
    pub rel_err_numeric: f64,
    pub rel_err_asymptotic: f64,
}

/// Per-size relative errors plus their extremes over the size range.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub max_rel_err_numeric: f64,
    pub argmax_n: usize,
    pub min_rel_err_asymptotic: f64,
    pub max_rel_err_asymptotic: f64,
}

pub fn compare_report(report: &ExperimentReport) -> Result<Comparison> {
    let first = report
        .rows
        .first()
        .ok_or_else(|| Error::Report("cannot compare an empty report".into()))?;
    let rows: Vec<ComparisonRow> = report
        .rows
        .iter()
        .map(|r| ComparisonRow {
            n: r.n,
            empirical_mean: r.empirical_mean,
            predicted_numeric: r.predicted_numeric,
            predicted_asymptotic: r.predicted_asymptotic,
            rel_err_numeric: r.rel_err_numeric,
            rel_err_asymptotic: r.rel_err_asymptotic,
        })
        .collect();
    let (mut max_num, mut argmax_n) = (first.rel_err_numeric, first.n);
    let (mut min_asy, mut max_asy) = (first.rel_err_asymptotic, first.rel_err_asymptotic);
    for r in &rows[1..] {
        if r.rel_err_numeric > max_num {
            max_num = r.rel_err_numeric;
            argmax_n = r.n;
        }
        min_asy = min_asy.min(r.rel_err_asymptotic);
        max_asy = max_asy.max(r.rel_err_asymptotic);
    }
    Ok(Comparison {
        rows,
        max_rel_err_numeric: max_num,
        argmax_n,
        min_rel_err_asymptotic: min_asy,
        max_rel_err_asymptotic: max_asy,
    })
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n,empirical_mean,predicted_numeric,predicted_asymptotic,rel_err_numeric,rel_err_asymptotic")?;
        for r in &self.rows {
            writeln!(
                f,
                "{},{:.6},{:.6},{:.6},{:.4}%,{:.4}%",
                r.n,
                r.empirical_mean,
                r.predicted_numeric,
                r.predicted_asymptotic,
                100.0 * r.rel_err_numeric,
                100.0 * r.rel_err_asymptotic
            )?;
        }
        writeln!(
            f,
            "# max rel_err_numeric {:.4}% at n = {}",
            100.0 * self.max_rel_err_numeric,
            self.argmax_n
        )?;
        writeln!(
            f,
            "# rel_err_asymptotic range {:.4}% .. {:.4}%",
            100.0 * self.min_rel_err_asymptotic,
            100.0 * self.max_rel_err_asymptotic
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCheckRow {
    pub r: f64,
    pub empirical: f64,
    pub theoretical: f64,
    /// `(empirical - theoretical) / sqrt(theoretical (1 - theoretical) / samples)`.
    pub z: f64,
}

/// Compares the empirical frequency of `{w >= r}` over `samples` draws with
/// `L(e^r - 1)` at each level in `r_grid`.
pub fn tail_check(
    model: &GammaModel,
    r_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<TailCheckRow>> {
    if samples < TAIL_CHECK_MIN_SAMPLES {
        return Err(Error::Config(format!(
            "tail check needs at least {TAIL_CHECK_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let cost_model = CostModel::new(model.clone());
    let mut rng = stream(seed, 0, 0, StreamPurpose::CostSamples);
    let mut costs = (0..samples)
        .map(|_| sample_cost(&cost_model, &mut rng))
        .collect::<Result<Vec<f64>>>()?;
    costs.sort_by(f64::total_cmp);
    let n = samples as f64;
    r_grid
        .iter()
        .map(|&r| {
            let theoretical = tail_probability(model, r)?;
            let below = costs.partition_point(|&w| w < r);
            let empirical = (samples - below) as f64 / n;
            let se = (theoretical * (1.0 - theoretical) / n).sqrt();
            let diff = empirical - theoretical;
            let z = if diff == 0.0 { 0.0 } else { diff / se };
            Ok(TailCheckRow {
                r,
                empirical,
                theoretical,
                z,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(
        model: GammaModel,
        sizes: Vec<usize>,
        replicates: usize,
        mode: Mode,
    ) -> ExperimentConfig {
        ExperimentConfig {
            model,
            sizes,
            replicates,
            mode,
            master_seed: 11,
            parallelism: 2,
        }
    }

    #[test]
    fn config_validation() {
        let ok = config(GammaModel::Uniform01, vec![2, 5], 2, Mode::Annealed);
        assert!(ok.validate().is_ok());
        for bad in [
            ExperimentConfig {
                sizes: vec![],
                ..ok.clone()
            },
            ExperimentConfig {
                sizes: vec![1, 5],
                ..ok.clone()
            },
            ExperimentConfig {
                sizes: vec![5, 5],
                ..ok.clone()
            },
            ExperimentConfig {
                sizes: vec![6, 5],
                ..ok.clone()
            },
            ExperimentConfig {
                replicates: 1,
                ..ok.clone()
            },
            ExperimentConfig {
                parallelism: 0,
                ..ok.clone()
            },
            ExperimentConfig {
                model: GammaModel::Constant(-1.0),
                ..ok.clone()
            },
        ] {
            assert!(run_experiment(&bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn single_row_structure() {
        let cfg = config(GammaModel::Constant(1.0), vec![2], 2, Mode::Annealed);
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        let row = report.rows[0];
        assert_eq!(row.n, 2);
        let optima: Vec<f64> = (0..2)
            .map(|k| run_replicate(&cfg, 2, k, None).unwrap())
            .collect();
        assert_eq!(row.empirical_mean, (optima[0] + optima[1]) / 2.0);
        assert!((row.std_error - (optima[0] - optima[1]).abs() / 2.0).abs() < 1e-15);
        assert_eq!(
            row.rel_err_numeric,
            relative_error(row.predicted_numeric, row.empirical_mean)
        );
    }

    #[test]
    fn constant_quenched_equals_annealed() {
        let a = run_experiment(&config(
            GammaModel::Constant(2.0),
            vec![3, 6],
            5,
            Mode::Annealed,
        ))
        .unwrap();
        let q = run_experiment(&config(
            GammaModel::Constant(2.0),
            vec![3, 6],
            5,
            Mode::Quenched,
        ))
        .unwrap();
        assert_eq!(a.rows, q.rows);
        assert_ne!(a.mode, q.mode);
    }

    #[test]
    fn asymptotic_prediction_values() {
        let e = asymptotic_prediction(&GammaModel::StdExponential, 100).unwrap();
        assert!((e - 200.0 * 100f64.ln().ln()).abs() < 1e-12);
        assert!((e - 305.44).abs() < 0.01);
        let p = asymptotic_prediction(&GammaModel::PolynomialTail { alpha: 3.0 }, 100).unwrap();
        assert!((p - 230.2585).abs() < 1e-3);
        let c = asymptotic_prediction(&GammaModel::Constant(1.0), 16).unwrap();
        assert!((c - 16.0 * 16f64.ln().ln()).abs() < 1e-12);
        assert!(asymptotic_prediction(&GammaModel::Uniform01, 2).is_err());
    }

    #[test]
    fn comparison_summaries() {
        let row = |n, emp, num: f64, asy: f64| ReportRow {
            n,
            empirical_mean: emp,
            std_error: 0.1,
            predicted_numeric: num,
            predicted_asymptotic: asy,
            rel_err_numeric: relative_error(num, emp),
            rel_err_asymptotic: relative_error(asy, emp),
        };
        let mut report = ExperimentReport {
            model: "exp".into(),
            mode: Mode::Annealed,
            replicates: 2,
            seed: 0,
            rows: vec![row(10, 10.0, 10.5, 13.0)],
        };
        let single = compare_report(&report).unwrap();
        assert_eq!(single.argmax_n, 10);
        assert_eq!(single.max_rel_err_numeric, 0.05);
        assert_eq!(single.min_rel_err_asymptotic, single.max_rel_err_asymptotic);

        report.rows = vec![row(10, 10.0, 10.0, 13.0), row(20, 20.0, 20.0, 25.0)];
        let exact = compare_report(&report).unwrap();
        assert_eq!(exact.max_rel_err_numeric, 0.0);
        assert_eq!(exact.min_rel_err_asymptotic, 0.25);
        assert!((exact.max_rel_err_asymptotic - 0.3).abs() < 1e-15);
        assert!(exact
            .to_string()
            .contains("# max rel_err_numeric 0.0000% at n = 10"));

        report.rows.clear();
        assert!(compare_report(&report).is_err());
    }

    #[test]
    fn tail_check_level_zero() {
        let rows = tail_check(&GammaModel::StdExponential, &[0.0], 10_000, 5).unwrap();
        assert_eq!(rows[0].empirical, 1.0);
        assert_eq!(rows[0].theoretical, 1.0);
        assert_eq!(rows[0].z, 0.0);
        assert!(tail_check(&GammaModel::StdExponential, &[0.0], 9_999, 5).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("Quenched".parse::<Mode>().unwrap(), Mode::Quenched);
        assert!("both".parse::<Mode>().is_err());
    }
}
