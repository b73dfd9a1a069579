// SPDX-License-Identifier: Apache-2.0

//! Compensated accumulation: every addition's rounding error (TwoSum) is
//! carried separately.

use crate::smallmat::Complex;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, carry: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        let b = t - self.sum;
        self.carry += (self.sum - (t - b)) + (x - b);
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedComplex {
    pub re: CompensatedSum,
    pub im: CompensatedSum,
}

impl CompensatedComplex {
    #[inline]
    pub fn add(&mut self, z: Complex) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of a slice, in order.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<CompensatedSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(xs.iter().sum::<f64>(), 1.0);
        assert_eq!(compensated_sum(&xs), 2.0);
    }

    #[test]
    fn many_small_terms() {
        let xs = vec![0.1; 1_000_000];
        let naive: f64 = xs.iter().sum();
        let comp = compensated_sum(&xs);
        assert!((comp - 100_000.0).abs() < (naive - 100_000.0).abs());
        assert!((comp - 100_000.0).abs() < 1e-9);
    }
}
