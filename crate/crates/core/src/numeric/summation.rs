use crate::scalar::Real;

/// Neumaier's variant of Kahan summation. The result depends only on the
/// order in which terms are added.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sample mean and standard error of the mean (sample standard deviation
/// with the `m - 1` divisor, divided by `sqrt(m)`), both accumulated with
/// compensated sums in slice order. Returns `None` for fewer than two values.
pub fn mean_and_std_error<T: Real>(values: &[T]) -> Option<(T, T)> {
    if values.len() < 2 {
        return None;
    }
    let m = T::from_usize_lossy(values.len());
    let mean = values
        .iter()
        .copied()
        .collect::<CompensatedSum<T>>()
        .value()
        / m;
    let ss = values
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .collect::<CompensatedSum<T>>()
        .value();
    let var = ss / (m - T::one());
    Some((mean, (var / m).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let terms = [1.0e16_f64, 1.0, -1.0e16, 1.0];
        let naive: f64 = terms.iter().sum();
        let comp: CompensatedSum<f64> = terms.iter().copied().collect();
        assert_eq!(comp.value(), 2.0);
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn mean_and_se_small_sample() {
        let (mean, se) = mean_and_std_error(&[1.0_f64, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(mean, 2.5);
        // var = 5/3, se = sqrt(5/12)
        assert!((se - (5.0_f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!(mean_and_std_error(&[1.0_f64]).is_none());
    }

    #[test]
    fn works_for_f32() {
        let (mean, _) = mean_and_std_error(&[0.5_f32, 1.5]).unwrap();
        assert_eq!(mean, 1.0);
    }
}
