use svd_mpe::linalg::{SmallMatrix, SmallSvd, UpperTriangular};

use crate::OracleError;

/// Eigenvalues (descending) and eigenvectors (columns) of a symmetric
/// matrix by cyclic two-sided Jacobi rotations.
pub fn symmetric_eigen(sym: &SmallMatrix) -> Result<(Vec<f64>, SmallMatrix), OracleError> {
    let n = sym.nrows();
    let mut a = sym.clone();
    let mut v = SmallMatrix::identity(n);
    for _ in 0..100 {
        let mut off = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = a.get(i, j) * a.get(i, j);
                total += x;
                if i != j {
                    off += x;
                }
            }
        }
        if off <= 1e-30 * total || off == 0.0 {
            let mut pairs: Vec<(f64, Vec<f64>)> = (0..n).map(|i| (a.get(i, i), v.column(i))).collect();
            pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
            let mut vecs = SmallMatrix::zeros(n, n);
            for (j, (_, col)) in pairs.iter().enumerate() {
                for i in 0..n {
                    vecs.set(i, j, col[i]);
                }
            }
            return Ok((pairs.into_iter().map(|p| p.0).collect(), vecs));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    Err(OracleError::NoConvergence)
}

/// SVD of `R` through the eigen-decomposition of `R^T R`. Accurate only for
/// well-conditioned `R`; meant for cross-checking on `p <= 6`.
pub fn small_svd_oracle(r: &UpperTriangular) -> Result<SmallSvd, OracleError> {
    let p = r.size();
    let dense = r.to_dense();
    let gram = dense.transpose().mul(&dense);
    let (lambda, h) = symmetric_eigen(&gram)?;
    let sigma: Vec<f64> = lambda.iter().map(|l| l.max(0.0).sqrt()).collect();
    let rh = dense.mul(&h);
    let mut y = SmallMatrix::zeros(p, p);
    for j in 0..p {
        for i in 0..p {
            let v = if sigma[j] > 0.0 { rh.get(i, j) / sigma[j] } else { 0.0 };
            y.set(i, j, v);
        }
    }
    Ok(SmallSvd::new(y, sigma, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal() {
        let m = SmallMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let (l, _) = symmetric_eigen(&m).unwrap();
        assert_eq!(l, vec![3.0, 1.0]);
    }

    #[test]
    fn oracle_two_by_two() {
        let r = UpperTriangular::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let svd = small_svd_oracle(&r).unwrap();
        let s5 = 5f64.sqrt();
        assert!((svd.sigma()[0] - (3.0 + s5).sqrt()).abs() < 1e-14);
        assert!((svd.sigma()[1] - (3.0 - s5).sqrt()).abs() < 1e-14);
    }
}
