use crate::scalar::Real;

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection<T> {
    pub root: T,
    pub lo: T,
    pub hi: T,
    /// Function value at `root`.
    pub residual: T,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]` for a function whose values at the endpoints have
/// opposite signs (zero counts as either sign). Stops once the bracket is no
/// wider than `xtol`, or when it can no longer shrink in floating point.
///
/// `f` may fail; the first error is returned unchanged.
pub fn bisect<T, E, F>(mut f: F, lo: T, hi: T, xtol: T, max_iter: usize) -> Result<Bisection<T>, E>
where
    T: Real,
    F: FnMut(T) -> Result<T, E>,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = f(lo)?;
    let lo_positive = f_lo > T::zero();
    let two = T::lit(2.0);
    let mut iterations = 0;
    while hi - lo > xtol && iterations < max_iter {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        iterations += 1;
        // NaN lands on the hi side: treated as "past the crossing".
        if (fm > T::zero()) == lo_positive && !fm.is_nan() && fm != T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = lo + (hi - lo) / two;
    let residual = f(root)?;
    Ok(Bisection {
        root,
        lo,
        hi,
        residual,
        iterations,
    })
}

/// Doubles `hi` starting from `start` until `f(hi) <= 0`, for a function that
/// is positive to the left of its root. Returns `(lo, hi)` where `lo` is the
/// last point with `f > 0` (or `floor` if the first probe already succeeds),
/// or `Ok(None)` when `max_doublings` is exhausted.
pub fn expand_bracket<T, E, F>(
    mut f: F,
    floor: T,
    start: T,
    max_doublings: usize,
) -> Result<Option<(T, T)>, E>
where
    T: Real,
    F: FnMut(T) -> Result<T, E>,
{
    let mut lo = floor;
    let mut hi = start;
    for _ in 0..=max_doublings {
        let v = f(hi)?;
        if v <= T::zero() || v.is_nan() {
            return Ok(Some((lo, hi)));
        }
        lo = hi;
        hi = hi * T::lit(2.0);
    }
    Ok(None)
}
