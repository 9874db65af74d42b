//! Tail quantile of the cost `w = ln(1 + gamma h)`.
//!
//! Since `P(gamma h >= rho) = E exp(-rho / gamma) = L(rho)`, the tail is
//! `P(w >= r) = L(e^r - 1)` and the tail quantile `g(p)` is the root of
//! `ln L(e^r - 1) = ln p`. The expected maximal assignment grows like
//! `n g(1/n)` whenever `g` is slowly varying at zero.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::gamma_models::{log_laplace, GammaModel};
use crate::numeric::roots::{bisect, expand_bracket};

/// Bracket width at which bisection stops.
pub const QUANTILE_XTOL: f64 = 1e-10;
pub const MAX_BRACKET_DOUBLINGS: usize = 200;
const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileResult {
    pub p: f64,
    /// Solved `g(p)`.
    pub r: f64,
    /// Final bisection bracket `(r_lo, r_hi)`.
    pub bracket: (f64, f64),
    /// `ln L(e^r - 1) - ln p` at `r`.
    pub residual: f64,
    pub iterations: usize,
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "probability must lie in (0, 1), got {p}"
        )))
    }
}

/// `P(w >= r) = L(e^r - 1)`.
pub fn tail_probability(model: &GammaModel, r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Domain(format!("tail level must be >= 0, got {r}")));
    }
    Ok(log_laplace(model, r.exp_m1())?.exp())
}

/// Solves `ln L(e^r - 1) = ln p` for `r` by bisection. The bracket starts at
/// `[0, 1]` and its upper end doubles until the sign changes.
pub fn tail_quantile(model: &GammaModel, p: f64) -> Result<QuantileResult> {
    check_probability(p)?;
    let log_p = p.ln();
    let f = |r: f64| log_laplace(model, r.exp_m1()).map(|l| l - log_p);
    let (lo, hi) = expand_bracket(f, 0.0, 1.0, MAX_BRACKET_DOUBLINGS)?.ok_or(Error::Bracket {
        doublings: MAX_BRACKET_DOUBLINGS,
    })?;
    let b = bisect(f, lo, hi, QUANTILE_XTOL, MAX_BISECTIONS)?;
    Ok(QuantileResult {
        p,
        r: b.root,
        bracket: (b.lo, b.hi),
        residual: b.residual,
        iterations: b.iterations,
    })
}

/// `n g(1/n)`, the predicted expected maximum over `n x n` assignments.
pub fn predicted_max(model: &GammaModel, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("matrix order must be >= 2, got {n}")));
    }
    Ok(n as f64 * tail_quantile(model, 1.0 / n as f64)?.r)
}

/// Leading-order closed form of `g(p)` as `p -> 0`. Requires `p < e^-e`, so
/// that `ln|ln p| > 1`.
///
/// For the exponential law this is `ln(|ln p|^2 / 4)` rather than the cruder
/// `2 ln|ln p|`, which converges too slowly to be useful at practical `p`.
pub fn asymptotic_g(model: &GammaModel, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < (-E).exp()) {
        return Err(Error::Domain(format!(
            "asymptotic g needs 0 < p < e^-e, got {p}"
        )));
    }
    model.validate()?;
    let abs_log = -p.ln();
    match *model {
        GammaModel::Constant(c) => Ok((c * abs_log).ln_1p()),
        GammaModel::StdExponential => Ok((abs_log * abs_log / 4.0).ln()),
        GammaModel::PolynomialTail { alpha } => Ok(abs_log / (alpha - 1.0)),
        GammaModel::Uniform01 => Ok(abs_log.ln()),
        GammaModel::UserDensity(_) => Err(Error::Unsupported("asymptotic tail quantile")),
    }
}

/// `g(lambda p) / g(p)`; tends to 1 when `g` is slowly varying at zero.
pub fn slow_variation_ratio(model: &GammaModel, p: f64, lambda: f64) -> Result<f64> {
    check_probability(p)?;
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    check_probability(lambda * p)?;
    if lambda == 1.0 {
        return Ok(1.0);
    }
    Ok(tail_quantile(model, lambda * p)?.r / tail_quantile(model, p)?.r)
}
