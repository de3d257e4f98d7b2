//! Modified Gram-Schmidt QR of a tall matrix.

use super::vector::{axpy, dot, norm2};
use super::{DenseVector, LinalgError, TallMatrix, UpperTriangular};

/// `A = Q R` with orthonormal columns in `Q` and a positive diagonal in `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct QrFactors {
    q: TallMatrix,
    r: UpperTriangular,
    trailing_deficient: bool,
}

impl QrFactors {
    pub fn q(&self) -> &TallMatrix {
        &self.q
    }

    pub fn r(&self) -> &UpperTriangular {
        &self.r
    }

    /// True when the last column of the input depended (to within the rank
    /// tolerance) on the others. The last column of `Q` is then not
    /// meaningful, while `r_kk` holds the tiny remainder norm.
    pub fn trailing_deficient(&self) -> bool {
        self.trailing_deficient
    }

    pub fn reconstruct(&self) -> TallMatrix {
        self.q.mul_small(&self.r.to_dense())
    }
}

/// QR factorization by modified Gram-Schmidt, rejecting any column whose
/// orthogonalized norm falls to `rank_tol * r_00` or below.
pub fn mgs_qr(a: &TallMatrix, rank_tol: f64) -> Result<QrFactors, LinalgError> {
    factor(a, rank_tol, false)
}

/// Like [`mgs_qr`], but a dependent **last** column is accepted. This is the
/// situation at finite termination, where `U_k` has rank `k` exactly and the
/// extrapolation is still well defined.
pub fn mgs_qr_trailing(a: &TallMatrix, rank_tol: f64) -> Result<QrFactors, LinalgError> {
    factor(a, rank_tol, true)
}

fn factor(a: &TallMatrix, rank_tol: f64, allow_trailing: bool) -> Result<QrFactors, LinalgError> {
    let n = a.nrows();
    let p = a.ncols();
    let max_cols = if allow_trailing { n + 1 } else { n };
    if p > max_cols {
        return Err(LinalgError::TooWide { rows: n, cols: p });
    }

    let mut r = UpperTriangular::zeros(p);
    let mut q: Vec<DenseVector> = Vec::with_capacity(p);
    let mut trailing_deficient = false;

    let r00 = norm2(a.column(0));
    if !(r00 > f64::MIN_POSITIVE) {
        return Err(LinalgError::RankDeficient { column: 0 });
    }
    r.set(0, 0, r00);
    q.push(divide(a.column(0), r00));

    for j in 1..p {
        let mut w = a.column(j).clone();
        for (i, qi) in q.iter().enumerate() {
            let rij = dot(qi, &w);
            r.set(i, j, rij);
            axpy(-rij, qi, w.as_mut_slice());
        }
        let rjj = norm2(&w);
        if rjj <= rank_tol * r00 {
            if !(allow_trailing && j == p - 1) {
                return Err(LinalgError::RankDeficient { column: j });
            }
            trailing_deficient = true;
        }
        r.set(j, j, rjj);
        if rjj > 0.0 {
            q.push(divide(&w, rjj));
        } else {
            q.push(DenseVector::zeros(n));
        }
    }

    Ok(QrFactors {
        q: TallMatrix::from_columns(q)?,
        r,
        trailing_deficient,
    })
}

fn divide(v: &DenseVector, d: f64) -> DenseVector {
    DenseVector::from_raw(v.iter().map(|x| x / d).collect())
}
