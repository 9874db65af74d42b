use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxassign_core::{GammaModel, Mode, MODEL_SPEC_GRAMMAR};

pub fn model_help() -> String {
    format!(
        "Model spec grammar (case-insensitive): {MODEL_SPEC_GRAMMAR}\n\
         Sizes grammar: a..b:step (b included when b - a is a multiple of step) or a comma list such as 10,20,50"
    )
}

#[derive(Debug, Parser)]
#[command(
    name = "maxassign",
    version,
    about = "Expected maximum of random assignments with costs ln(1 + gamma*h)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predicted expected maximum n*g(1/n) and the one-term growth formula.
    #[command(after_help = model_help())]
    Predict {
        #[arg(value_parser = parse_model)]
        model: GammaModel,
        #[arg(value_parser = parse_sizes)]
        sizes: Sizes,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of the expected maximum, solved exactly per replicate.
    #[command(after_help = model_help())]
    Simulate {
        #[arg(value_parser = parse_model)]
        model: GammaModel,
        #[arg(long, value_parser = parse_sizes)]
        sizes: Sizes,
        #[arg(long, short = 'm', default_value_t = 300)]
        replicates: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Annealed)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Maximum number of replicates solved concurrently.
        #[arg(long, short = 'j', default_value_t = default_jobs())]
        jobs: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Relative-error table and summary for a report written by `simulate`.
    #[command(after_help = model_help())]
    Compare {
        /// Report file (CSV, or JSON if it starts with '[').
        report: PathBuf,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Empirical tail frequency of the cost against L(e^r - 1).
    #[command(name = "tail-check", after_help = model_help())]
    TailCheck {
        #[arg(value_parser = parse_model)]
        model: GammaModel,
        /// Comma-separated tail levels r >= 0.
        #[arg(long = "r", value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0, 3.0])]
        levels: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve one max-assignment given as CSV (n rows of n comma-separated reals).
    #[command(after_help = model_help())]
    Solve { matrix: PathBuf },
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Annealed,
    Quenched,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Annealed => Mode::Annealed,
            ModeArg::Quenched => Mode::Quenched,
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_model(s: &str) -> Result<GammaModel, String> {
    s.parse::<GammaModel>().map_err(|e| e.to_string())
}

/// Strictly increasing matrix orders, each >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

/// `a..b:step`, `a..b` (step 1) or a comma list.
pub fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let s = s.trim();
    let bad = || format!("invalid sizes '{s}': expected a..b:step or a comma list");
    let sizes: Vec<usize> = if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, step)) => (b, step),
            None => (rest, "1"),
        };
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if step == 0 || b < a {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if sizes.is_empty() || sizes.iter().any(|&n| n < 2) {
        return Err(format!("invalid sizes '{s}': every size must be >= 2"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!(
            "invalid sizes '{s}': sizes must be strictly increasing"
        ));
    }
    Ok(Sizes(sizes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_grammar() {
        assert_eq!(
            parse_sizes("10..50:10").unwrap().0,
            vec![10, 20, 30, 40, 50]
        );
        assert_eq!(parse_sizes("10..45:10").unwrap().0, vec![10, 20, 30, 40]);
        assert_eq!(parse_sizes("2..4").unwrap().0, vec![2, 3, 4]);
        assert_eq!(parse_sizes("10, 20,50").unwrap().0, vec![10, 20, 50]);
        assert_eq!(parse_sizes("1000").unwrap().0, vec![1000]);
        assert_eq!(parse_sizes("10..1000:10").unwrap().0.len(), 100);
        for bad in [
            "", "1", "10,5", "10,10", "a..b", "10..5:1", "10..20:0", "2,x",
        ] {
            assert!(parse_sizes(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
