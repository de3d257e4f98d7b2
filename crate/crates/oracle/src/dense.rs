use svd_mpe::linalg::SmallMatrix;

use crate::OracleError;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &SmallMatrix, b: &[f64]) -> Result<Vec<f64>, OracleError> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.len(), n);
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .expect("non-empty");
        if m[pivot][col] == 0.0 {
            return Err(OracleError::Singular);
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for c in col..=n {
                m[row][c] -= factor * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n];
        for j in i + 1..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Ok(x)
}

pub fn invert(a: &SmallMatrix) -> Result<SmallMatrix, OracleError> {
    let n = a.nrows();
    let mut inv = SmallMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for i in 0..n {
            inv.set(i, j, col[i]);
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = SmallMatrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 1.0]]).unwrap();
        let x = solve(&a, &[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![2.0, 1.0]);
        let inv = invert(&a).unwrap();
        assert!(inv.mul(&a).max_abs_diff(&SmallMatrix::identity(2)) < 1e-15);
        let sing = SmallMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(solve(&sing, &[1.0, 1.0]).is_err());
    }
}
