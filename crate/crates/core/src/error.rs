use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cost matrix must have order n >= 1")]
    EmptyMatrix,

    #[error("cost matrix of order {n} needs {expected} entries, got {got}")]
    ShapeMismatch {
        n: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite cost entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("brute-force enumeration supports n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(
        "malformed model spec '{spec}': expected one of constant:<c>, exp, pareto:<alpha>, uniform"
    )]
    ModelSpec { spec: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("{0} is not supported for this model")]
    Unsupported(&'static str),

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("root bracket expansion failed after {doublings} doublings")]
    Bracket { doublings: usize },

    #[error("sampling from user density failed: {0}")]
    Sampling(String),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("replicate {replicate} at n = {n} failed: {source}")]
    Replicate {
        n: usize,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("report format error: {0}")]
    Report(String),
}

impl Error {
    /// True for failures of the numeric machinery (quadrature, bracketing)
    /// as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Quadrature { .. } | Error::Bracket { .. } => true,
            Error::Replicate { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
