//! Determinant representations `s = D(x) / D(1)`.
//!
//! The `(k+1) x (k+1)` matrix has first row `v_0, ..., v_k` and rows
//! `u_{i,0}, ..., u_{i,k}` for `i = 0..k-1`. Expanding along the first row,
//! `D(v) = sum_j C_j v_j` with cofactors `C_j`, so `gamma_j = C_j / sum C`.

use svd_mpe::linalg::{QrFactors, SmallMatrix, SmallSvd};
use svd_mpe::{DenseVector, IterateWindow};

use crate::eigen::symmetric_eigen;
use crate::OracleError;

/// Determinant by recursive cofactor expansion along the first row.
pub fn det_cofactor(m: &SmallMatrix) -> f64 {
    let n = m.nrows();
    assert_eq!(m.ncols(), n);
    let rows: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    det_rows(&rows)
}

fn det_rows(rows: &[Vec<f64>]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        n => (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * rows[0][j] * det_rows(&minor(&rows[1..], j))
            })
            .sum(),
    }
}

fn minor(rows: &[Vec<f64>], skip: usize) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, v)| *v).collect())
        .collect()
}

/// First-row cofactors of the matrix whose lower `k` rows are `weights`.
fn cofactors(weights: &SmallMatrix) -> Vec<f64> {
    let cols = weights.ncols();
    assert_eq!(weights.nrows() + 1, cols, "weights must be k x (k+1)");
    let rows: Vec<Vec<f64>> = (0..weights.nrows()).map(|i| weights.row(i).to_vec()).collect();
    (0..cols)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * det_rows(&minor(&rows, j))
        })
        .collect()
}

/// `gamma_j = C_j / D(1)`, after checking that `D(1)` is not numerically
/// zero relative to the Hadamard bound of the matrix.
pub fn det_gamma(weights: &SmallMatrix) -> Result<Vec<f64>, OracleError> {
    let cof = cofactors(weights);
    let denom: f64 = cof.iter().sum();
    let mut scale = (weights.ncols() as f64).sqrt();
    for i in 0..weights.nrows() {
        scale *= weights.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    if !(denom.abs() > 1e-13 * scale) {
        return Err(OracleError::SingularDenominator { value: denom });
    }
    Ok(cof.iter().map(|c| c / denom).collect())
}

/// `D(x_n, ..., x_{n+k}) / D(1, ..., 1)` for vector entries in the first row.
pub fn det_representation(first_row: &[DenseVector], weights: &SmallMatrix) -> Result<Vec<f64>, OracleError> {
    assert_eq!(first_row.len(), weights.ncols());
    let gamma = det_gamma(weights)?;
    let mut s = vec![0.0; first_row[0].len()];
    for (g, x) in gamma.iter().zip(first_row) {
        for (si, xi) in s.iter_mut().zip(x.iter()) {
            *si += g * xi;
        }
    }
    Ok(s)
}

pub fn det_representation_scalar(first_row: &[f64], weights: &SmallMatrix) -> Result<f64, OracleError> {
    assert_eq!(first_row.len(), weights.ncols());
    let gamma = det_gamma(weights)?;
    Ok(gamma.iter().zip(first_row).map(|(g, x)| g * x).sum())
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `u_{ij} = (u_i, u_j)`.
pub fn mpe_weights(window: &IterateWindow) -> SmallMatrix {
    let k = window.k();
    let u = window.differences();
    let mut w = SmallMatrix::zeros(k, k + 1);
    for i in 0..k {
        for j in 0..=k {
            w.set(i, j, inner(u.column(i), u.column(j)));
        }
    }
    w
}

/// `u_{ij} = (u_i, u_j) - sigma_kk^2 delta_ij`. Requires `sigma_kk` to lie
/// strictly below the smallest singular value of `U_{k-1}`.
pub fn svd_mpe_weights_shifted_gram(window: &IterateWindow, sigma_kk: f64) -> Result<SmallMatrix, OracleError> {
    let k = window.k();
    let mut w = mpe_weights(window);
    let mut gram = SmallMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, w.get(i, j));
        }
    }
    let (lambda, _) = symmetric_eigen(&gram)?;
    let sigma_prev = lambda[k - 1].max(0.0).sqrt();
    if !(sigma_kk < sigma_prev) {
        return Err(OracleError::GapViolated { sigma_kk, sigma_prev });
    }
    for i in 0..k {
        w.set(i, i, w.get(i, i) - sigma_kk * sigma_kk);
    }
    Ok(w)
}

/// `u_{ij} = (g_i, u_j)` with `g_i = Q_k y_i`.
pub fn svd_mpe_weights_left_vectors(window: &IterateWindow, qr: &QrFactors, svd: &SmallSvd) -> SmallMatrix {
    let k = window.k();
    let u = window.differences();
    let q = qr.q();
    let mut w = SmallMatrix::zeros(k, k + 1);
    for i in 0..k {
        let g = q.mul_vec(&svd.y().column(i));
        for j in 0..=k {
            w.set(i, j, inner(&g, u.column(j)));
        }
    }
    w
}

/// Same weights through `(g_i, u_j) = y_i^T r_j`, where `r_j` is column `j`
/// of `R_k`.
pub fn svd_mpe_weights_left_vectors_via_r(qr: &QrFactors, svd: &SmallSvd) -> SmallMatrix {
    let r = qr.r().to_dense();
    let p = r.nrows();
    let k = p - 1;
    let mut w = SmallMatrix::zeros(k, p);
    for i in 0..k {
        let y = svd.y().column(i);
        for j in 0..p {
            w.set(i, j, inner(&y, &r.column(j)));
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cofactor_determinants() {
        let m = SmallMatrix::from_rows(&[vec![2.0, 0.0, 1.0], vec![1.0, 3.0, 2.0], vec![1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(det_cofactor(&m), 0.0);
        let m = SmallMatrix::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(det_cofactor(&m), 10.0);
        assert_eq!(det_cofactor(&SmallMatrix::identity(5)), 1.0);
    }

    #[test]
    fn scalar_representation() {
        // | 1 5 | / | 1 1 |
        // | 2 1 |   | 2 1 |  = (1 - 10) / (1 - 2) = 9
        let w = SmallMatrix::from_rows(&[vec![2.0, 1.0]]).unwrap();
        assert_eq!(det_representation_scalar(&[1.0, 5.0], &w).unwrap(), 9.0);
        let flat = SmallMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            det_representation_scalar(&[1.0, 5.0], &flat),
            Err(OracleError::SingularDenominator { .. })
        ));
    }
}
