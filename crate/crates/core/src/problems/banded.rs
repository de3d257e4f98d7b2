use super::{FixedPointProblem, ProblemError};
use crate::linalg::DenseVector;

const SCALE: f64 = 0.06;
/// Interior stencil weights by distance from the diagonal.
const STENCIL: [f64; 4] = [6.0, 3.0, 1.0, 1.0];

/// `x -> T x + d` for the seven-band `T` that is symmetric about both
/// diagonals, with `d = (I - T) 1` so that the all-ones vector is the fixed
/// point.
///
/// Interior rows are `0.06 * [1, 1, 3, 6, 3, 1, 1]`; the two corner
/// rows at each end are `0.06 * [5, 2, 1, 1]` and `0.06 * [2, 6, 3, 1, 1]`.
#[derive(Debug, Clone)]
pub struct BandedLinearProblem {
    n: usize,
    d: Vec<f64>,
    solution: Vec<f64>,
}

impl BandedLinearProblem {
    pub fn new(n: usize) -> Result<Self, ProblemError> {
        if n == 0 {
            return Err(ProblemError::Empty);
        }
        let ones = vec![1.0; n];
        let mut p = Self {
            n,
            d: Vec::new(),
            solution: ones,
        };
        let t1 = p.mul_t(&p.solution);
        p.d = t1.iter().map(|v| 1.0 - v).collect();
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Entry `T_ij`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let off = i.abs_diff(j);
        if off > 3 {
            return 0.0;
        }
        let last = self.n - 1;
        let w = if (i == 0 && j == 0) || (i == last && j == last) {
            5.0
        } else if (i.min(j) == 0 && i.max(j) == 1) || (last >= 1 && i.min(j) == last - 1 && i.max(j) == last) {
            2.0
        } else {
            STENCIL[off]
        };
        SCALE * w
    }

    /// `T x`, evaluated bandwise.
    pub fn mul_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(3);
                let hi = (i + 3).min(self.n - 1);
                let mut acc = 0.0;
                for j in lo..=hi {
                    acc += self.entry(i, j) * x[j];
                }
                acc
            })
            .collect()
    }

    /// One step `T x + d`.
    pub fn banded_iterate(&self, x: &DenseVector) -> Result<DenseVector, ProblemError> {
        if x.len() != self.n {
            return Err(ProblemError::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(DenseVector::from_raw(self.apply(x)))
    }
}

impl FixedPointProblem for BandedLinearProblem {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.mul_t(x);
        for (yi, di) in y.iter_mut().zip(&self.d) {
            *yi += di;
        }
        y
    }

    fn known_solution(&self) -> Option<&[f64]> {
        Some(&self.solution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_is_fixed_point() {
        let p = BandedLinearProblem::new(50).unwrap();
        let y = p.banded_iterate(&DenseVector::ones(50)).unwrap();
        assert!(y.iter().all(|v| (v - 1.0).abs() <= 1e-15));
    }

    #[test]
    fn first_column_for_n6() {
        let p = BandedLinearProblem::new(6).unwrap();
        let y = p.banded_iterate(&DenseVector::unit(6, 0)).unwrap();
        let col = [5.0, 2.0, 1.0, 1.0, 0.0, 0.0];
        for i in 0..6 {
            let want = 0.06 * col[i] + p.d()[i];
            assert!((y[i] - want).abs() <= 1e-15, "row {i}");
        }
    }

    #[test]
    fn rows_match_display() {
        let p = BandedLinearProblem::new(10).unwrap();
        let row = |i: usize| -> Vec<f64> { (0..10).map(|j| (p.entry(i, j) / 0.06).round()).collect() };
        assert_eq!(row(0)[..5], [5.0, 2.0, 1.0, 1.0, 0.0]);
        assert_eq!(row(1)[..6], [2.0, 6.0, 3.0, 1.0, 1.0, 0.0]);
        assert_eq!(row(2)[..7], [1.0, 3.0, 6.0, 3.0, 1.0, 1.0, 0.0]);
        assert_eq!(row(3)[..8], [1.0, 1.0, 3.0, 6.0, 3.0, 1.0, 1.0, 0.0]);
        assert_eq!(row(4)[..8], [0.0, 1.0, 1.0, 3.0, 6.0, 3.0, 1.0, 1.0]);
        assert_eq!(row(9)[5..], [0.0, 1.0, 1.0, 2.0, 5.0]);
    }

    #[test]
    fn symmetric_and_persymmetric() {
        for n in [1, 2, 3, 5, 9, 20] {
            let p = BandedLinearProblem::new(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(p.entry(i, j), p.entry(j, i));
                    assert_eq!(p.entry(i, j), p.entry(n - 1 - i, n - 1 - j));
                }
            }
        }
    }

    #[test]
    fn spectral_radius_below_one() {
        let p = BandedLinearProblem::new(100).unwrap();
        let mut x = vec![1.0; 100];
        x[7] = 3.0;
        let mut lambda = 0.0;
        for _ in 0..2000 {
            let y = p.mul_t(&x);
            let ny = crate::linalg::norm2(&y);
            lambda = ny / crate::linalg::norm2(&x);
            x = y.iter().map(|v| v / ny).collect();
        }
        assert!(lambda < 1.0, "rho(T) ~ {lambda}");
        assert!(lambda > 0.9);
    }
}
