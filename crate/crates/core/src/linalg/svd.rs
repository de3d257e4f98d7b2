//! Full SVD of a small square matrix by one-sided Jacobi rotations.
//!
//! The rotations act on the columns of `R` directly, so the Gram matrix
//! `R^T R` is never formed and small singular values keep their relative
//! accuracy.

use super::vector::norm2;
use super::{LinalgError, SmallMatrix, UpperTriangular};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    /// Sweep cap before giving up with [`LinalgError::NoConvergence`].
    pub max_sweeps: usize,
    /// A column pair counts as orthogonal once
    /// `|a_i . a_j| <= sweep_tol * |a_i| |a_j|`.
    pub sweep_tol: f64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 30,
            sweep_tol: 1e-14,
        }
    }
}

/// `R = Y diag(sigma) H^T`, singular values in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallSvd {
    y: SmallMatrix,
    sigma: Vec<f64>,
    h: SmallMatrix,
}

impl SmallSvd {
    pub fn new(y: SmallMatrix, sigma: Vec<f64>, h: SmallMatrix) -> Self {
        Self { y, sigma, h }
    }

    /// Left singular vectors, one per column.
    pub fn y(&self) -> &SmallMatrix {
        &self.y
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Right singular vectors, one per column.
    pub fn h(&self) -> &SmallMatrix {
        &self.h
    }

    pub fn sigma_min(&self) -> f64 {
        *self.sigma.last().expect("non-empty SVD")
    }

    /// Right singular vector of the smallest singular value.
    pub fn h_min(&self) -> Vec<f64> {
        self.h.column(self.h.ncols() - 1)
    }

    pub fn reconstruct(&self) -> SmallMatrix {
        let p = self.sigma.len();
        let mut ys = self.y.clone();
        for j in 0..p {
            for i in 0..p {
                ys.set(i, j, ys.get(i, j) * self.sigma[j]);
            }
        }
        ys.mul(&self.h.transpose())
    }
}

pub fn svd_small(r: &UpperTriangular) -> Result<SmallSvd, LinalgError> {
    svd_small_with(r, SvdOptions::default())
}

pub fn svd_small_with(r: &UpperTriangular, opts: SvdOptions) -> Result<SmallSvd, LinalgError> {
    let p = r.size();
    if p == 0 {
        return Err(LinalgError::Empty);
    }
    let mut a = r.to_dense();
    let mut v = SmallMatrix::identity(p);

    let mut converged = p == 1;
    for _ in 0..opts.max_sweeps {
        let mut rotated = false;
        for i in 0..p - 1 {
            for j in i + 1..p {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..p {
                    let (ai, aj) = (a.get(k, i), a.get(k, j));
                    alpha += ai * ai;
                    beta += aj * aj;
                    gamma += ai * aj;
                }
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= opts.sweep_tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + 1f64.hypot(zeta));
                let c = 1.0 / 1f64.hypot(t);
                let s = c * t;
                rotate(&mut a, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            sweeps: opts.max_sweeps,
        });
    }

    let norms: Vec<f64> = (0..p).map(|j| norm2(&a.column(j))).collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let mut y = SmallMatrix::zeros(p, p);
    let mut h = SmallMatrix::zeros(p, p);
    let mut sigma = Vec::with_capacity(p);
    let mut null_columns = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        for i in 0..p {
            h.set(i, dst, v.get(i, src));
        }
        if s > f64::MIN_POSITIVE {
            for i in 0..p {
                y.set(i, dst, a.get(i, src) / s);
            }
        } else {
            null_columns.push(dst);
        }
    }
    complete_basis(&mut y, &null_columns);
    fix_signs(&mut y, &mut h);

    Ok(SmallSvd { y, sigma, h })
}

fn rotate(m: &mut SmallMatrix, i: usize, j: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let (mi, mj) = (m.get(k, i), m.get(k, j));
        m.set(k, i, c * mi - s * mj);
        m.set(k, j, s * mi + c * mj);
    }
}

/// Fills the listed columns of `y` with unit vectors orthogonal to every
/// other column.
fn complete_basis(y: &mut SmallMatrix, missing: &[usize]) {
    let p = y.nrows();
    let mut filled: Vec<usize> = (0..p).filter(|j| !missing.contains(j)).collect();
    for &col in missing {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for e in 0..p {
            let mut w = vec![0.0; p];
            w[e] = 1.0;
            for _ in 0..2 {
                for &f in &filled {
                    let yf = y.column(f);
                    let proj: f64 = yf.iter().zip(&w).map(|(a, b)| a * b).sum();
                    for (wi, yi) in w.iter_mut().zip(&yf) {
                        *wi -= proj * yi;
                    }
                }
            }
            let nw = norm2(&w);
            if best.as_ref().map_or(true, |(b, _)| nw > *b) {
                best = Some((nw, w));
            }
        }
        let (nw, w) = best.expect("p >= 1");
        for i in 0..p {
            y.set(i, col, w[i] / nw);
        }
        filled.push(col);
    }
}

/// Deterministic sign choice: each column of `h` gets a non-negative entry
/// sum, or a positive first non-zero entry when the sum vanishes. The paired
/// column of `y` flips with it.
fn fix_signs(y: &mut SmallMatrix, h: &mut SmallMatrix) {
    let p = h.nrows();
    let zero = 4.0 * f64::EPSILON * p as f64;
    for j in 0..h.ncols() {
        let col = h.column(j);
        let sum: f64 = col.iter().sum();
        let flip = if sum.abs() > zero {
            sum < 0.0
        } else {
            col.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0)
        };
        if flip {
            h.negate_column(j);
            y.negate_column(j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(r: &UpperTriangular, svd: &SmallSvd) {
        let s = svd.sigma();
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.iter().all(|v| *v >= 0.0));
        assert!(svd.y().orthonormality_defect() <= 1e-12);
        assert!(svd.h().orthonormality_defect() <= 1e-12);
        assert!(svd.reconstruct().max_abs_diff(&r.to_dense()) <= 1e-12 * s[0]);
    }

    #[test]
    fn diagonal_input() {
        let r = UpperTriangular::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let svd = svd_small(&r).unwrap();
        assert_eq!(svd.sigma(), &[3.0, 2.0, 1.0]);
        for j in 0..3 {
            assert_eq!(svd.h().get(j, j).abs(), 1.0);
        }
        check_invariants(&r, &svd);
    }

    #[test]
    fn one_by_one() {
        let r = UpperTriangular::from_rows(&[vec![5.0]]).unwrap();
        let svd = svd_small(&r).unwrap();
        assert_eq!(svd.sigma(), &[5.0]);
        assert_eq!(svd.y().get(0, 0).abs(), 1.0);
        assert_eq!(svd.h().get(0, 0).abs(), 1.0);

        let neg = UpperTriangular::from_rows(&[vec![-5.0]]).unwrap();
        let svd = svd_small(&neg).unwrap();
        assert_eq!(svd.sigma(), &[5.0]);
        assert_eq!(svd.h().get(0, 0), 1.0);
        assert_eq!(svd.y().get(0, 0), -1.0);
    }

    #[test]
    fn two_by_two_closed_form() {
        // sigma^2 are the roots of l^2 - 6 l + 4 (char. polynomial of R^T R).
        let r = UpperTriangular::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let svd = svd_small(&r).unwrap();
        let s5 = 5f64.sqrt();
        let expected = [(3.0 + s5).sqrt(), (3.0 - s5).sqrt()];
        for (got, want) in svd.sigma().iter().zip(expected) {
            assert!((got - want).abs() <= 1e-14 * want, "{got} vs {want}");
        }
        assert!((svd.sigma()[0] - 2.28825).abs() < 1e-5);
        assert!((svd.sigma()[1] - 0.87403).abs() < 1e-5);
        check_invariants(&r, &svd);
    }

    #[test]
    fn singular_input_gets_completed_basis() {
        let r = UpperTriangular::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let svd = svd_small(&r).unwrap();
        assert!((svd.sigma()[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!(svd.sigma()[1] <= 1e-15);
        check_invariants(&r, &svd);
    }

    #[test]
    fn sweep_cap_is_enforced() {
        let r = UpperTriangular::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let opts = SvdOptions {
            max_sweeps: 0,
            ..SvdOptions::default()
        };
        assert_eq!(
            svd_small_with(&r, opts),
            Err(LinalgError::NoConvergence { sweeps: 0 })
        );
    }

    #[test]
    fn sign_convention_is_deterministic() {
        let r = UpperTriangular::from_rows(&[
            vec![1.0, -2.0, 0.5],
            vec![0.0, 3.0, 1.0],
            vec![0.0, 0.0, 0.25],
        ])
        .unwrap();
        let svd = svd_small(&r).unwrap();
        for j in 0..3 {
            let sum: f64 = svd.h().column(j).iter().sum();
            assert!(sum >= 0.0);
        }
        check_invariants(&r, &svd);
    }
}
