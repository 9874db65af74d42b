//! Laws of the fading coefficient `gamma`, sampling of costs
//! `w = ln(1 + gamma * h)` with `h ~ Exp(1)`, and the Laplace transform
//! `L(rho) = E exp(-rho / gamma)` evaluated in the log domain.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::numeric::quadrature::{integrate, QuadratureOptions, QuadratureResult};

/// Grammar accepted by [`GammaModel::from_str`], case-insensitive.
pub const MODEL_SPEC_GRAMMAR: &str = "constant:<c> | exp | pareto:<alpha> | uniform";

/// Relative tolerance requested from the quadrature. Leaves headroom under
/// the 1e-9 relative target on `ln L`.
const QUAD_REL_TOL: f64 = 1e-11;
const QUAD_MAX_INTERVALS: usize = 4000;
/// Beyond this the shifted integrand is treated as zero when placing breakpoints.
const NEGLIGIBLE: f64 = 1e-40;
const MAX_BREAKPOINTS_PER_SIDE: usize = 60;
/// Cells in the inverse-CDF table of a user density.
const USER_TABLE_CELLS: usize = 2048;

/// Density of `gamma` supplied by the caller, supported on `[lower, upper]`
/// (`upper` may be infinite). Normalisation is checked at construction.
#[derive(Clone)]
pub struct UserDensity {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lower: f64,
    upper: f64,
    // Cumulative mass at the cell edges of the mapped variable t in [0, 1].
    cdf: Arc<[f64]>,
}

impl fmt::Debug for UserDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserDensity")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}

impl UserDensity {
    pub fn new<F>(density: F, lower: f64, upper: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lower >= 0.0 && lower.is_finite() && upper > lower) {
            return Err(Error::InvalidModel(format!(
                "user density support [{lower}, {upper}] must satisfy 0 <= lower < upper"
            )));
        }
        let mut this = Self {
            density: Arc::new(density),
            lower,
            upper,
            cdf: Arc::from(vec![]),
        };
        let mut cdf = Vec::with_capacity(USER_TABLE_CELLS + 1);
        cdf.push(0.0);
        let mut total = 0.0;
        let opts = QuadratureOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_intervals: 200,
        };
        for k in 0..USER_TABLE_CELLS {
            let a = k as f64 / USER_TABLE_CELLS as f64;
            let b = (k + 1) as f64 / USER_TABLE_CELLS as f64;
            let mut bad = None;
            let cell = integrate(
                |t| {
                    let (y, jac) = this.map(t);
                    let q = (this.density)(y);
                    if q < 0.0 || !q.is_finite() {
                        bad = Some((y, q));
                        return 0.0;
                    }
                    q * jac
                },
                &[a, b],
                &opts,
            )
            .unwrap_or_else(|partial| partial);
            if let Some((y, q)) = bad {
                return Err(Error::InvalidModel(format!(
                    "user density must be finite and nonnegative, got {q} at {y}"
                )));
            }
            total += cell.value;
            cdf.push(total);
        }
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidModel(format!(
                "user density integrates to {total}, expected 1 within 1e-6"
            )));
        }
        cdf.iter_mut().for_each(|c| *c /= total);
        this.cdf = Arc::from(cdf);
        Ok(this)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn density(&self, y: f64) -> f64 {
        if y < self.lower || y > self.upper {
            0.0
        } else {
            (self.density)(y)
        }
    }

    /// `t in [0, 1] -> (y, dy/dt)` onto the support.
    fn map(&self, t: f64) -> (f64, f64) {
        if self.upper.is_finite() {
            let w = self.upper - self.lower;
            (self.lower + w * t, w)
        } else {
            let s = 1.0 - t;
            (self.lower + t / s, 1.0 / (s * s))
        }
    }

    /// Inverse CDF by table lookup with linear interpolation in the mapped
    /// variable.
    fn quantile(&self, u: f64) -> f64 {
        let k = self
            .cdf
            .partition_point(|&c| c <= u)
            .clamp(1, USER_TABLE_CELLS);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let frac = if c1 > c0 {
            ((u - c0) / (c1 - c0)).clamp(0.0, 1.0)
        } else {
            0.5
        };
        let t = ((k - 1) as f64 + frac) / USER_TABLE_CELLS as f64;
        self.map(t).0
    }
}

/// Law of `gamma`.
#[derive(Debug, Clone)]
pub enum GammaModel {
    /// `gamma == c` almost surely, `c > 0`.
    Constant(f64),
    /// Standard exponential.
    StdExponential,
    /// Pareto density `(alpha - 1) y^(-alpha)` on `[1, inf)`, `alpha > 1`;
    /// tail constant `a = alpha - 1`.
    PolynomialTail {
        alpha: f64,
    },
    /// Uniform on `[0, 1]`.
    Uniform01,
    UserDensity(UserDensity),
}

impl GammaModel {
    pub fn constant(c: f64) -> Result<Self> {
        let m = GammaModel::Constant(c);
        m.validate()?;
        Ok(m)
    }

    pub fn polynomial_tail(alpha: f64) -> Result<Self> {
        let m = GammaModel::PolynomialTail { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn user_density<F>(density: F, lower: f64, upper: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        UserDensity::new(density, lower, upper).map(GammaModel::UserDensity)
    }

    /// The four closed-form families, with representative parameters.
    pub fn built_in() -> Vec<GammaModel> {
        vec![
            GammaModel::Constant(1.0),
            GammaModel::StdExponential,
            GammaModel::PolynomialTail { alpha: 3.0 },
            GammaModel::Uniform01,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GammaModel::Constant(c) if !(c > 0.0 && c.is_finite()) => Err(Error::InvalidModel(
                format!("constant gamma must be positive and finite, got {c}"),
            )),
            GammaModel::PolynomialTail { alpha } if !(alpha > 1.0 && alpha.is_finite()) => Err(
                Error::InvalidModel(format!("tail exponent alpha must exceed 1, got {alpha}")),
            ),
            _ => Ok(()),
        }
    }

    /// Maps a uniform draw `u in [0, 1)` through the inverse CDF. `None` for
    /// the exponential family, which is sampled directly.
    pub fn gamma_from_uniform(&self, u: f64) -> Option<f64> {
        match self {
            GammaModel::Constant(c) => Some(*c),
            GammaModel::Uniform01 => Some(u),
            GammaModel::PolynomialTail { alpha } => Some((1.0 - u).powf(-1.0 / (alpha - 1.0))),
            GammaModel::UserDensity(d) => Some(d.quantile(u)),
            GammaModel::StdExponential => None,
        }
    }
}

impl fmt::Display for GammaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaModel::Constant(c) => write!(f, "constant:{c}"),
            GammaModel::StdExponential => f.write_str("exp"),
            GammaModel::PolynomialTail { alpha } => write!(f, "pareto:{alpha}"),
            GammaModel::Uniform01 => f.write_str("uniform"),
            GammaModel::UserDensity(_) => f.write_str("user"),
        }
    }
}

impl FromStr for GammaModel {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let malformed = || Error::ModelSpec {
            spec: spec.to_string(),
        };
        let lower = spec.trim().to_ascii_lowercase();
        let (name, arg) = match lower.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (lower.as_str(), None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            a.and_then(|s| s.parse::<f64>().ok()).ok_or_else(malformed)
        };
        let model = match (name, arg) {
            ("constant", a) => GammaModel::Constant(number(a)?),
            ("exp", None) => GammaModel::StdExponential,
            ("pareto", a) => GammaModel::PolynomialTail { alpha: number(a)? },
            ("uniform", None) => GammaModel::Uniform01,
            _ => return Err(malformed()),
        };
        model.validate().map_err(|e| match e {
            Error::InvalidModel(msg) => Error::InvalidModel(format!("{spec}: {msg}")),
            other => other,
        })?;
        Ok(model)
    }
}

/// One draw of `gamma`.
pub fn sample_gamma<R: Rng + ?Sized>(model: &GammaModel, rng: &mut R) -> Result<f64> {
    if let GammaModel::Constant(c) = model {
        return Ok(*c);
    }
    if let GammaModel::StdExponential = model {
        return Ok(rng.sample(Exp1));
    }
    let u: f64 = rng.random();
    let g = model.gamma_from_uniform(u).expect("inverse-CDF family");
    if g.is_nan() || g < 0.0 {
        return Err(Error::Sampling(format!(
            "inverse CDF returned {g} for u = {u}"
        )));
    }
    Ok(g)
}

/// `ln(1 + gamma * h)`.
#[inline]
pub fn cost_from_draws(gamma: f64, h: f64) -> f64 {
    (gamma * h).ln_1p()
}

/// Cost model `w = ln(1 + gamma * h)`: `gamma` from the wrapped law, `h`
/// standard exponential and independent of `gamma`.
#[derive(Debug, Clone)]
pub struct CostModel {
    pub gamma: GammaModel,
}

impl CostModel {
    pub fn new(gamma: GammaModel) -> Self {
        Self { gamma }
    }
}

/// Draws `gamma` then `h` from `rng` and returns the cost.
pub fn sample_cost<R: Rng + ?Sized>(model: &CostModel, rng: &mut R) -> Result<f64> {
    let gamma = sample_gamma(&model.gamma, rng)?;
    let h: f64 = rng.sample(Exp1);
    Ok(cost_from_draws(gamma, h))
}

/// Frozen `n x n` matrix of positive `gamma` values for quenched runs.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl GammaMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::ShapeMismatch {
                n,
                expected: n * n,
                got: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidModel(format!(
                "gamma matrix entry ({}, {}) = {} is not positive and finite",
                k / n,
                k % n,
                entries[k]
            )));
        }
        Ok(Self { n, entries })
    }

    /// `n * n` independent draws, row-major.
    pub fn sample<R: Rng + ?Sized>(model: &GammaModel, n: usize, rng: &mut R) -> Result<Self> {
        let entries = (0..n * n)
            .map(|_| sample_gamma(model, rng))
            .collect::<Result<Vec<_>>>()?;
        // Uniform01 can produce an exact zero; keep it, it is a null-probability event.
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Costs `ln(1 + gamma_ij h_ij)` for the given gammas with fresh `h` from `rng`.
pub fn costs_with_gamma<R: Rng + ?Sized>(
    gammas: &GammaMatrix,
    rng: &mut R,
) -> Result<crate::matching::CostMatrix<f64>> {
    let entries = gammas
        .entries
        .iter()
        .map(|&g| cost_from_draws(g, rng.sample(Exp1)))
        .collect();
    crate::matching::CostMatrix::new(gammas.n, entries)
}

/// Random `n x n` cost matrix. Without `gamma_matrix` (annealed) all `n^2`
/// gammas are drawn first, then all `n^2` fading values; with it (quenched)
/// only the fading values are drawn.
pub fn generate_cost_matrix<R: Rng + ?Sized>(
    model: &CostModel,
    n: usize,
    gamma_matrix: Option<&GammaMatrix>,
    rng: &mut R,
) -> Result<crate::matching::CostMatrix<f64>> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    match gamma_matrix {
        Some(g) if g.n != n => Err(Error::ShapeMismatch {
            n,
            expected: n * n,
            got: g.entries.len(),
        }),
        Some(g) => costs_with_gamma(g, rng),
        None => {
            let g = GammaMatrix::sample(&model.gamma, n, rng)?;
            costs_with_gamma(&g, rng)
        }
    }
}

// ---------------------------------------------------------------------------
// Laplace transform

/// Integral representation `L(rho) = int_lo^hi exp(log_weight(x) - rho * inv_gamma(x)) dx`
/// together with the location and width of the integrand's peak.
struct LaplaceIntegral<'a> {
    lo: f64,
    hi: f64,
    mode: f64,
    scale: f64,
    log_weight: Box<dyn Fn(f64) -> f64 + 'a>,
    inv_gamma: Box<dyn Fn(f64) -> f64 + 'a>,
}

impl GammaModel {
    fn laplace_integral(&self, rho: f64) -> LaplaceIntegral<'_> {
        match self {
            GammaModel::StdExponential => {
                // Peak of -y - rho/y at sqrt(rho), curvature -2/sqrt(rho).
                let mode = rho.sqrt();
                LaplaceIntegral {
                    lo: 0.0,
                    hi: f64::INFINITY,
                    mode,
                    scale: rho.sqrt().sqrt() / 2f64.sqrt(),
                    log_weight: Box::new(|y| -y),
                    inv_gamma: Box::new(|y| 1.0 / y),
                }
            }
            GammaModel::Uniform01 => LaplaceIntegral {
                lo: 0.0,
                hi: 1.0,
                mode: 1.0,
                scale: (1.0 / rho).min(1.0),
                log_weight: Box::new(|_| 0.0),
                inv_gamma: Box::new(|y| 1.0 / y),
            },
            GammaModel::PolynomialTail { alpha } => {
                // gamma = u^(-1/(alpha-1)) for u uniform: the integrand
                // exp(-rho u^(1/(alpha-1))) decays from u = 0 on scale rho^-(alpha-1).
                let k = 1.0 / (alpha - 1.0);
                LaplaceIntegral {
                    lo: 0.0,
                    hi: 1.0,
                    mode: 0.0,
                    scale: (-(alpha - 1.0) * rho.ln()).exp().clamp(1e-300, 1.0),
                    log_weight: Box::new(|_| 0.0),
                    inv_gamma: Box::new(move |u: f64| u.powf(k)),
                }
            }
            GammaModel::UserDensity(d) => {
                let log_weight = move |y: f64| d.density(y).ln();
                let (mode, scale) = locate_peak(d, |y| log_weight(y) - rho / y);
                LaplaceIntegral {
                    lo: d.lower,
                    hi: d.upper,
                    mode,
                    scale,
                    log_weight: Box::new(log_weight),
                    inv_gamma: Box::new(|y| 1.0 / y),
                }
            }
            GammaModel::Constant(_) => unreachable!("closed form"),
        }
    }
}

/// Grid search followed by golden-section refinement of the maximiser of `psi`
/// over the density's support; the width is the grid spacing at the peak.
fn locate_peak(d: &UserDensity, psi: impl Fn(f64) -> f64) -> (f64, f64) {
    const GRID: usize = 4096;
    let ys: Vec<f64> = (1..GRID).map(|k| d.map(k as f64 / GRID as f64).0).collect();
    let best = (0..ys.len())
        .max_by(|&a, &b| {
            let (pa, pb) = (psi(ys[a]), psi(ys[b]));
            pa.partial_cmp(&pb).unwrap_or(if pa.is_nan() {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            })
        })
        .unwrap_or(0);
    let mut a = if best == 0 { d.lower } else { ys[best - 1] };
    let mut b = if best + 1 == ys.len() {
        ys[best].max(d.map(1.0 - 0.5 / GRID as f64).0)
    } else {
        ys[best + 1]
    };
    let width = ((b - a) / 2.0).max(f64::MIN_POSITIVE);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - inv_phi * (b - a);
        let e = a + inv_phi * (b - a);
        if psi(c) >= psi(e) {
            b = e;
        } else {
            a = c;
        }
    }
    let mode = ((a + b) / 2.0).clamp(d.lower, d.upper);
    (mode, width)
}

/// Breakpoints spreading geometrically away from `mode` towards the ends of
/// `[lo, hi]`. For an infinite `hi` the last returned point is where the
/// shifted integrand becomes negligible.
fn breakpoints(lo: f64, hi: f64, mode: f64, scale: f64, shifted: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let mut left = Vec::new();
    if mode > lo {
        let factor = ((mode - lo) / scale)
            .powf(1.0 / MAX_BREAKPOINTS_PER_SIDE as f64)
            .max(4.0);
        let mut step = scale;
        while left.len() < MAX_BREAKPOINTS_PER_SIDE && mode - step > lo {
            left.push(mode - step);
            step *= factor;
        }
        left.push(lo);
        left.reverse();
    }
    let mut pts = left;
    pts.push(mode);
    if mode < hi {
        let factor = if hi.is_finite() {
            ((hi - mode) / scale)
                .powf(1.0 / MAX_BREAKPOINTS_PER_SIDE as f64)
                .max(4.0)
        } else {
            4.0
        };
        let mut step = scale;
        for _ in 0..MAX_BREAKPOINTS_PER_SIDE {
            let y = mode + step;
            if y >= hi {
                break;
            }
            pts.push(y);
            if !hi.is_finite() && shifted(y) < NEGLIGIBLE {
                break;
            }
            step *= factor;
        }
        if hi.is_finite() {
            pts.push(hi);
        }
    }
    pts.dedup();
    pts
}

/// Integrates `f` over `[points[0], last]` and, if `infinite_tail`, adds the
/// tail beyond `last` through `y = last + s t / (1 - t)`.
fn integrate_with_tail(
    f: &dyn Fn(f64) -> f64,
    points: &[f64],
    infinite_tail: Option<f64>,
) -> std::result::Result<QuadratureResult<f64>, QuadratureResult<f64>> {
    let opts = QuadratureOptions {
        abs_tol: 0.0,
        rel_tol: QUAD_REL_TOL,
        max_intervals: QUAD_MAX_INTERVALS,
    };
    let body = if points.len() >= 2 {
        integrate(f, points, &opts)?
    } else {
        QuadratureResult {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
            evaluations: 0,
        }
    };
    let Some(s) = infinite_tail else {
        return Ok(body);
    };
    let start = *points.last().expect("non-empty breakpoints");
    let tail_opts = QuadratureOptions {
        abs_tol: QUAD_REL_TOL * body.value.abs(),
        ..opts
    };
    let tail = integrate(
        |t: f64| {
            let one_minus = 1.0 - t;
            let v = f(start + s * t / one_minus) * s / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        &[0.0, 1.0],
        &tail_opts,
    );
    let combine = |t: QuadratureResult<f64>| QuadratureResult {
        value: body.value + t.value,
        abs_error: body.abs_error + t.abs_error,
        intervals: body.intervals + t.intervals,
        evaluations: body.evaluations + t.evaluations,
    };
    tail.map(combine).map_err(combine)
}

fn quadrature_error(r: QuadratureResult<f64>) -> Error {
    Error::Quadrature {
        estimate: r.value,
        error: r.abs_error,
    }
}

/// `ln L(rho)` where `L(rho) = E exp(-rho / gamma)`.
///
/// The peak of the integrand is factored out before integrating, so values of
/// `L` far below the smallest positive `f64` are still returned accurately.
/// When `L > 1/2` the complement `1 - L` is integrated instead and `ln_1p`
/// applied, which keeps relative accuracy as `rho -> 0`.
pub fn log_laplace(model: &GammaModel, rho: f64) -> Result<f64> {
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::Domain(format!(
            "Laplace argument must be >= 0, got {rho}"
        )));
    }
    model.validate()?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    if rho == f64::INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if let GammaModel::Constant(c) = model {
        return Ok(-rho / c);
    }
    let li = model.laplace_integral(rho);
    let psi = |x: f64| {
        let v = (li.log_weight)(x) - rho * (li.inv_gamma)(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let peak = psi(li.mode);
    let peak = if peak.is_finite() { peak } else { 0.0 };
    let shifted = |x: f64| (psi(x) - peak).exp();
    let pts = breakpoints(li.lo, li.hi, li.mode, li.scale, &shifted);
    let tail = (!li.hi.is_finite()).then(|| {
        let last = *pts.last().expect("non-empty");
        (last - li.mode).max(li.scale)
    });
    let main = integrate_with_tail(&shifted, &pts, tail).map_err(quadrature_error)?;
    let log_l = peak + main.value.ln();
    if log_l > -std::f64::consts::LN_2 {
        let complement = |x: f64| {
            let w = (li.log_weight)(x).exp();
            let v = -w * (-rho * (li.inv_gamma)(x)).exp_m1();
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let c = integrate_with_tail(&complement, &pts, tail).map_err(quadrature_error)?;
        return Ok((-c.value).ln_1p());
    }
    Ok(log_l)
}

/// Leading-order large-`rho` form of `ln L(rho)`.
pub fn log_laplace_asymptotic(model: &GammaModel, rho: f64) -> Result<f64> {
    model.validate()?;
    match *model {
        GammaModel::Constant(c) => Ok(-rho / c),
        GammaModel::StdExponential => Ok(0.5 * PI.ln() + 0.25 * rho.ln() - 2.0 * rho.sqrt()),
        // a * Gamma(alpha - 1) with a = alpha - 1 is Gamma(alpha).
        GammaModel::PolynomialTail { alpha } => Ok(libm::lgamma(alpha) - (alpha - 1.0) * rho.ln()),
        GammaModel::Uniform01 => Ok(-rho - rho.ln()),
        GammaModel::UserDensity(_) => Err(Error::Unsupported("Laplace asymptotics")),
    }
}
