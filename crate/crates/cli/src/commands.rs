use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use maxassign_core::report::format_real;
use maxassign_core::{
    asymptotic_g, asymptotic_prediction, compare_report, run_experiment, solve_max_assignment,
    tail_check, tail_quantile, CostMatrix, Error, ExperimentConfig, ExperimentReport, GammaModel,
};
use serde_json::{json, Value};

use crate::args::{Command, Format, OutputArgs};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_SIMULATION: u8 = 4;
pub const EXIT_TAIL_CHECK: u8 = 5;
/// |z| above this fails `tail-check`.
pub const TAIL_Z_LIMIT: f64 = 4.0;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(e: io::Error) -> Self {
        Self {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() {
            EXIT_NUMERIC
        } else if matches!(e, Error::Replicate { .. }) {
            EXIT_SIMULATION
        } else {
            EXIT_USAGE
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Predict {
            model,
            sizes,
            output,
        } => predict(&model, &sizes.0, &output),
        Command::Simulate {
            model,
            sizes,
            replicates,
            mode,
            seed,
            jobs,
            output,
        } => {
            let config = ExperimentConfig {
                model,
                sizes: sizes.0,
                replicates,
                mode: mode.into(),
                master_seed: seed,
                parallelism: jobs,
            };
            simulate(&config, &output)
        }
        Command::Compare { report, output } => compare(&report, output.as_deref()),
        Command::TailCheck {
            model,
            levels,
            samples,
            seed,
            output,
        } => tail_check_cmd(&model, &levels, samples, seed, &output),
        Command::Solve { matrix } => solve(&matrix),
    }
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(CliError::io),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(CliError::io)
        }
    }
}

fn json_real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Writes rows of reals as CSV (17 significant digits) or as a JSON array of
/// objects with the same keys.
fn write_table(
    columns: &[&str],
    rows: &[(usize, Vec<f64>)],
    lead: &str,
    out: &OutputArgs,
) -> CliResult<()> {
    let text = match out.format {
        Format::Csv => {
            let mut s = format!("{lead},{}\n", columns.join(","));
            for (key, vals) in rows {
                s.push_str(&key.to_string());
                for v in vals {
                    s.push(',');
                    s.push_str(&format_real(*v));
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(key, vals)| {
                    let mut obj = serde_json::Map::new();
                    obj.insert(lead.to_string(), json!(key));
                    for (c, v) in columns.iter().zip(vals) {
                        obj.insert(c.to_string(), json_real(*v));
                    }
                    Value::Object(obj)
                })
                .collect();
            serde_json::to_string_pretty(&items).expect("json") + "\n"
        }
    };
    emit(out.output.as_deref(), &text)
}

fn predict(model: &GammaModel, sizes: &[usize], out: &OutputArgs) -> CliResult<ExitCode> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let p = 1.0 / n as f64;
        let g = tail_quantile(model, p)?.r;
        let g_asy = asymptotic_g(model, p).unwrap_or(f64::NAN);
        let n_asy = asymptotic_prediction(model, n).unwrap_or(f64::NAN);
        rows.push((n, vec![g, g_asy, n as f64 * g, n_asy]));
    }
    write_table(
        &[
            "g_numeric",
            "g_asymptotic",
            "predicted_numeric",
            "predicted_asymptotic",
        ],
        &rows,
        "n",
        out,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn simulate(config: &ExperimentConfig, out: &OutputArgs) -> CliResult<ExitCode> {
    let report = run_experiment(config).map_err(|e| {
        let mut err = CliError::from(e);
        if err.code == EXIT_USAGE && config.validate().is_ok() {
            err.code = EXIT_SIMULATION;
        }
        err
    })?;
    let text = match out.format {
        Format::Csv => report.to_csv_string(),
        Format::Json => report.to_json_string() + "\n",
    };
    emit(out.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn compare(path: &Path, output: Option<&Path>) -> CliResult<ExitCode> {
    let text = fs::read_to_string(path).map_err(CliError::io)?;
    let report = if text.trim_start().starts_with('[') {
        ExperimentReport::from_json_str(&text)?
    } else {
        ExperimentReport::read_csv(text.as_bytes())?
    };
    let comparison = compare_report(&report)?;
    emit(output, &comparison.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn tail_check_cmd(
    model: &GammaModel,
    levels: &[f64],
    samples: usize,
    seed: u64,
    out: &OutputArgs,
) -> CliResult<ExitCode> {
    if let Some(r) = levels.iter().find(|r| r.is_nan() || **r < 0.0) {
        return Err(CliError::usage(format!(
            "tail levels must be >= 0, got {r}"
        )));
    }
    let rows = tail_check(model, levels, samples, seed)?;
    let text = match out.format {
        Format::Csv => {
            let mut s = String::from("r,empirical,theoretical,z\n");
            for row in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    format_real(row.r),
                    format_real(row.empirical),
                    format_real(row.theoretical),
                    format_real(row.z)
                ));
            }
            s
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "r": row.r,
                        "empirical": row.empirical,
                        "theoretical": row.theoretical,
                        "z": json_real(row.z),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&items).expect("json") + "\n"
        }
    };
    emit(out.output.as_deref(), &text)?;
    if rows.iter().all(|r| r.z.abs() <= TAIL_Z_LIMIT) {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("tail check failed: some |z| exceeds {TAIL_Z_LIMIT}");
        Ok(ExitCode::from(EXIT_TAIL_CHECK))
    }
}

fn parse_matrix(text: &str) -> CliResult<CostMatrix<f64>> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        CliError::usage(format!("row {}: '{}' is not a number", i + 1, t.trim()))
                    })
                })
                .collect::<CliResult<Vec<f64>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CostMatrix::from_rows(&rows)?)
}

fn solve(path: &Path) -> CliResult<ExitCode> {
    let text = fs::read_to_string(path).map_err(CliError::io)?;
    let m = parse_matrix(&text)?;
    let a = solve_max_assignment(&m)?;
    let perm: Vec<String> = a.permutation.iter().map(usize::to_string).collect();
    emit(
        None,
        &format!("{}\n{}\n", format_real(a.value), perm.join(" ")),
    )?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_parsing() {
        let m = parse_matrix("1,2,0\n0,5,1\n2,0,3\n\n").unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(parse_matrix("1,2\n3\n").unwrap_err().code, EXIT_USAGE);
        assert_eq!(parse_matrix("1,x\n3,4\n").unwrap_err().code, EXIT_USAGE);
        assert_eq!(parse_matrix("").unwrap_err().code, EXIT_USAGE);
        assert_eq!(parse_matrix("nan").unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn error_codes() {
        assert_eq!(
            CliError::from(Error::Quadrature {
                estimate: 1.0,
                error: 1.0
            })
            .code,
            EXIT_NUMERIC
        );
        assert_eq!(
            CliError::from(Error::Bracket { doublings: 200 }).code,
            EXIT_NUMERIC
        );
        let rep = Error::Replicate {
            n: 10,
            replicate: 3,
            source: Box::new(Error::EmptyMatrix),
        };
        let e = CliError::from(rep);
        assert_eq!(e.code, EXIT_SIMULATION);
        assert!(e.message.contains("replicate 3 at n = 10"));
        assert_eq!(CliError::from(Error::Domain("x".into())).code, EXIT_USAGE);
    }
}
