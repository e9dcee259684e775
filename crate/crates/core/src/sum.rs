//! Compensated and log-domain summation.

use crate::scalar::Real;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Neumaier<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Real> FromIterator<T> for Neumaier<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    values.into_iter().collect::<Neumaier<T>>().value()
}

/// `ln Σ exp(xᵢ)`, stable for arbitrarily negative inputs. Returns `-inf` for an empty slice.
pub fn log_sum_exp<T: Real>(logs: &[T]) -> T {
    let max = logs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    let s = compensated_sum(logs.iter().map(|&l| (l - max).exp()));
    max + s.ln()
}

/// `ln(exp(a) - exp(b))` for `a >= b`. Returns `-inf` when the difference vanishes.
pub fn log_diff_exp<T: Real>(a: T, b: T) -> T {
    if b == T::neg_infinity() {
        return a;
    }
    let d = b - a;
    if d >= T::zero() {
        return T::neg_infinity();
    }
    a + (-d.exp_m1()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v.iter().copied()), 2.0);
        let naive: f64 = v.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn log_sum_exp_handles_underflow() {
        let logs = [-1000.0_f64, -1000.0];
        let v = log_sum_exp(&logs);
        assert!((v - (-1000.0 + 2.0_f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn log_diff_exp_matches_direct() {
        let a = 0.3_f64.ln();
        let b = 0.1_f64.ln();
        assert!((log_diff_exp(a, b).exp() - 0.2).abs() < 1e-15);
        assert_eq!(log_diff_exp(a, a), f64::NEG_INFINITY);
    }

    #[test]
    fn works_in_single_precision() {
        let s = compensated_sum((0..1000).map(|_| 0.1_f32));
        assert!((s - 100.0).abs() < 1e-4);
    }
}
