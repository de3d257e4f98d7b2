use super::vector::{axpy, dot};
use super::{DenseVector, LinalgError};

/// Column-stored `N x p` matrix. Columns all share one length.
#[derive(Debug, Clone, PartialEq)]
pub struct TallMatrix {
    nrows: usize,
    columns: Vec<DenseVector>,
}

impl TallMatrix {
    pub fn from_columns(columns: Vec<DenseVector>) -> Result<Self, LinalgError> {
        let nrows = columns.first().map(DenseVector::len).ok_or(LinalgError::Empty)?;
        if let Some(bad) = columns.iter().find(|c| c.len() != nrows) {
            return Err(LinalgError::DimensionMismatch {
                expected: nrows,
                found: bad.len(),
            });
        }
        Ok(Self { nrows, columns })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &DenseVector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[DenseVector] {
        &self.columns
    }

    pub fn max_abs(&self) -> f64 {
        self.columns.iter().fold(0.0, |m, c| m.max(c.norm_max()))
    }

    /// `A x` as a linear combination of the columns.
    pub fn mul_vec(&self, x: &[f64]) -> DenseVector {
        assert_eq!(x.len(), self.ncols());
        let mut out = vec![0.0; self.nrows];
        for (col, &w) in self.columns.iter().zip(x) {
            axpy(w, col, &mut out);
        }
        DenseVector::from_raw(out)
    }

    /// `A^T v`
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.nrows);
        self.columns.iter().map(|c| dot(c, v)).collect()
    }

    /// `A^T A` as a dense `p x p` matrix.
    pub fn gram(&self) -> SmallMatrix {
        let p = self.ncols();
        let mut g = SmallMatrix::zeros(p, p);
        for i in 0..p {
            for j in i..p {
                let v = self.columns[i].dot(&self.columns[j]);
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    }

    /// `A M` for a small `p x m` matrix `M`.
    pub fn mul_small(&self, m: &SmallMatrix) -> TallMatrix {
        assert_eq!(m.nrows(), self.ncols());
        let columns = (0..m.ncols()).map(|j| self.mul_vec(&m.column(j))).collect();
        TallMatrix {
            nrows: self.nrows,
            columns,
        }
    }
}

/// Square upper-triangular matrix, stored densely with explicit zeros below
/// the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperTriangular {
    size: usize,
    data: Vec<f64>,
}

impl UpperTriangular {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            data: vec![0.0; size * size],
        }
    }

    /// Builds from dense rows; entries below the diagonal are dropped.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let size = rows.len();
        if size == 0 {
            return Err(LinalgError::Empty);
        }
        let mut r = Self::zeros(size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(LinalgError::DimensionMismatch {
                    expected: size,
                    found: row.len(),
                });
            }
            for j in i..size {
                if !row[j].is_finite() {
                    return Err(LinalgError::NonFinite { index: i * size + j });
                }
                r.set(i, j, row[j]);
            }
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i <= j);
        self.data[i * self.size + j] = v;
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> UpperTriangular {
        assert!(k <= self.size);
        let mut out = Self::zeros(k);
        for i in 0..k {
            for j in i..k {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// `R x`, touching only the upper triangle.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.size);
        (0..self.size)
            .map(|i| {
                let mut acc = 0.0;
                for j in i..self.size {
                    acc += self.get(i, j) * x[j];
                }
                acc
            })
            .collect()
    }

    /// Column `j` restricted to rows `0..rows`.
    pub fn column_head(&self, j: usize, rows: usize) -> Vec<f64> {
        (0..rows).map(|i| self.get(i, j)).collect()
    }

    /// Solves `R x = b` by back substitution.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        assert_eq!(b.len(), self.size);
        let mut x = b.to_vec();
        for i in (0..self.size).rev() {
            let mut acc = x[i];
            for j in i + 1..self.size {
                acc -= self.get(i, j) * x[j];
            }
            let d = self.get(i, i);
            if d == 0.0 {
                return Err(LinalgError::Singular);
            }
            x[i] = acc / d;
        }
        Ok(x)
    }

    pub fn to_dense(&self) -> SmallMatrix {
        SmallMatrix {
            nrows: self.size,
            ncols: self.size,
            data: self.data.clone(),
        }
    }
}

/// Small dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl SmallMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).ok_or(LinalgError::Empty)?;
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(LinalgError::DimensionMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Self { nrows, ncols, data })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn transpose(&self) -> SmallMatrix {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &SmallMatrix) -> SmallMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for j in 0..other.ncols {
                let mut acc = 0.0;
                for l in 0..self.ncols {
                    acc += self.get(i, l) * other.get(l, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `max |a_ij - b_ij|`
    pub fn max_abs_diff(&self, other: &SmallMatrix) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max |(A^T A - I)_ij|`, the departure of the columns from orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.transpose().mul(self);
        g.max_abs_diff(&Self::identity(self.ncols))
    }

    pub(crate) fn negate_column(&mut self, j: usize) {
        for i in 0..self.nrows {
            self.data[i * self.ncols + j] = -self.data[i * self.ncols + j];
        }
    }
}
