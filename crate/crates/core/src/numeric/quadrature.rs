//! Globally adaptive 15-point Gauss-Kronrod quadrature over a finite
//! interval split at caller-supplied breakpoints.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate meets `max(abs_tol, rel_tol * |integral|)`.

#![allow(clippy::excessive_precision)]

use crate::scalar::Real;

// Kronrod abscissae on [0, 1), descending; the 7-point Gauss nodes are the
// odd-indexed entries plus the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::zero(),
            rel_tol: T::lit(1e-10),
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error: T,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let two = T::lit(2.0);
    let center = (a + b) / two;
    let half = (b - a) / two;
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * T::lit(x);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod = kronrod + T::lit(w) * (f1 + f2);
        if k % 2 == 1 {
            gauss = gauss + T::lit(WG[k / 2]) * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from one segment
/// per pair of consecutive breakpoints. `points` must be strictly increasing
/// with at least two entries.
///
/// On failure to reach the tolerance, the best estimate is returned in `Err`.
pub fn integrate<T, F>(
    mut f: F,
    points: &[T],
    opts: &QuadratureOptions<T>,
) -> Result<QuadratureResult<T>, QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    assert!(points.len() >= 2, "need at least two breakpoints");
    let mut segments: Vec<Segment<T>> = points
        .windows(2)
        .map(|w| {
            debug_assert!(w[0] < w[1], "breakpoints must increase");
            gk15(&mut f, w[0], w[1])
        })
        .collect();
    let mut evaluations = 15 * segments.len();

    let totals = |segs: &[Segment<T>]| {
        segs.iter().fold((T::zero(), T::zero()), |(v, e), s| {
            (v + s.value, e + s.error)
        })
    };

    loop {
        let (value, error) = totals(&segments);
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        let result = QuadratureResult {
            value,
            abs_error: error,
            intervals: segments.len(),
            evaluations,
        };
        if error <= target {
            return Ok(result);
        }
        if !value.is_finite() || segments.len() >= opts.max_intervals {
            return Err(result);
        }
        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |(bi, be), (i, s)| {
                    if s.error > be {
                        (i, s.error)
                    } else {
                        (bi, be)
                    }
                });
        let Segment { a, b, .. } = segments[worst];
        let mid = a + (b - a) / T::lit(2.0);
        if mid <= a || mid >= b {
            // Cannot refine further in this precision.
            return Err(result);
        }
        segments[worst] = gk15(&mut f, a, mid);
        segments.push(gk15(&mut f, mid, b));
        evaluations += 30;
    }
}
