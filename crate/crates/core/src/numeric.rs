//! Small numeric helpers shared by the analysis modules.

use std::iter::FromIterator;

/// Compensated (Kahan–Babuška) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Formats a float with 17 significant digits, dot decimal.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `(1/N) Σ f·g`, the inner product of `L²(uniform)`.
pub fn uniform_inner(f: &[f64], g: &[f64]) -> f64 {
    debug_assert_eq!(f.len(), g.len());
    let s: KahanSum = f.iter().zip(g).map(|(a, b)| a * b).collect();
    s.value() / f.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut values = vec![1.0];
        values.extend(std::iter::repeat_n(1e-16, 10_000));
        let naive: f64 = values.iter().sum();
        let compensated: KahanSum = values.iter().copied().collect();
        assert_eq!(naive, 1.0);
        assert!((compensated.value() - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let x = 1.0 / 3.0;
        let s = fmt17(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
    }
}
