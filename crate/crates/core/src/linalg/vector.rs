use std::ops::{Deref, Index};

use super::LinalgError;

/// A finite real vector.
///
/// Construction through [`DenseVector::new`] rejects NaN and infinite
/// entries. Arithmetic on existing vectors does not re-check.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::Empty);
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![1.0; len])
    }

    /// Unit vector `e_index` of length `len`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = vec![0.0; len];
        v[index] = 1.0;
        Self(v)
    }

    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn norm_max(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self - other`, entry by entry.
    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|v| v * factor).collect())
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        axpy(alpha, &x.0, &mut self.0);
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = LinalgError;

    fn try_from(v: Vec<f64>) -> Result<Self, LinalgError> {
        Self::new(v)
    }
}

/// Inner product with strict left-to-right accumulation.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Euclidean norm, scaled to avoid overflow/underflow on extreme entries.
pub fn norm2(a: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let mut acc = 0.0;
    for v in a {
        let t = v / scale;
        acc += t * t;
    }
    scale * acc.sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            DenseVector::new(vec![1.0, f64::NAN]),
            Err(LinalgError::NonFinite { index: 1 })
        );
        assert_eq!(
            DenseVector::new(vec![f64::INFINITY]),
            Err(LinalgError::NonFinite { index: 0 })
        );
        assert_eq!(DenseVector::new(vec![]), Err(LinalgError::Empty));
    }

    #[test]
    fn norm_matches_naive() {
        let v = DenseVector::new(vec![3.0, 4.0, 0.0]).unwrap();
        assert_eq!(v.norm(), 5.0);
        assert_eq!(norm2(&[0.0, 0.0]), 0.0);
        let tiny = [3e-200, 4e-200];
        assert!((norm2(&tiny) - 5e-200).abs() < 1e-213);
    }

    #[test]
    fn axpy_and_sub() {
        let mut y = DenseVector::new(vec![1.0, 2.0]).unwrap();
        let x = DenseVector::new(vec![1.0, -1.0]).unwrap();
        y.axpy(2.0, &x);
        assert_eq!(y.as_slice(), &[3.0, 0.0]);
        assert_eq!(y.sub(&x).as_slice(), &[2.0, 1.0]);
    }
}
