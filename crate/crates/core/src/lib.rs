//! Maximum-weight random assignment with costs `w_ij = ln(1 + gamma_ij h_ij)`.
//!
//! * [`matching`]: exact Hungarian solver (maximisation) plus a brute-force
//!   oracle, generic over the scalar type.
//! * [`gamma_models`]: laws of `gamma`, cost sampling and the log-domain
//!   Laplace transform `L(rho) = E exp(-rho / gamma)`.
//! * [`quantile`]: the tail quantile `g(p)` solving `p = L(e^r - 1)` and the
//!   prediction `n g(1/n)` of the expected maximum.
//! * [`experiment`]: annealed and quenched Monte Carlo runs with
//!   reproducible per-replicate streams, and the report format.

pub mod error;
pub mod experiment;
pub mod gamma_models;
pub mod matching;
pub mod numeric;
pub mod quantile;
pub mod report;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use experiment::{
    asymptotic_prediction, compare_report, run_experiment, tail_check, Comparison,
    ExperimentConfig, Mode, TailCheckRow,
};
pub use gamma_models::{
    generate_cost_matrix, log_laplace, log_laplace_asymptotic, sample_cost, sample_gamma,
    CostModel, GammaMatrix, GammaModel, UserDensity, MODEL_SPEC_GRAMMAR,
};
pub use matching::{
    assignment_value, brute_force_max_assignment, solve_max_assignment, Assignment, CostMatrix,
};
pub use quantile::{
    asymptotic_g, predicted_max, slow_variation_ratio, tail_probability, tail_quantile,
    QuantileResult,
};
pub use report::{ExperimentReport, ReportRow};
pub use scalar::Real;

/// Cost matrix over `f64`, the precision used by the experiments.
pub type CostMatrixF64 = CostMatrix<f64>;
/// Cost matrix over `f32`.
pub type CostMatrixF32 = CostMatrix<f32>;
pub type AssignmentF64 = Assignment<f64>;
pub type AssignmentF32 = Assignment<f32>;
