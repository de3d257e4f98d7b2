//! Dense kernels: vectors, small matrices, modified Gram-Schmidt QR and a
//! one-sided Jacobi SVD for the small triangular factor.

mod matrix;
mod qr;
mod svd;
mod vector;

use thiserror::Error;

pub use matrix::{SmallMatrix, TallMatrix, UpperTriangular};
pub use qr::{mgs_qr, mgs_qr_trailing, QrFactors};
pub use svd::{svd_small, svd_small_with, SmallSvd, SvdOptions};
pub use vector::{axpy, dot, norm2, DenseVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("empty vector or matrix")]
    Empty,
    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix with {rows} rows cannot hold {cols} independent columns")]
    TooWide { rows: usize, cols: usize },
    #[error("column {column} is numerically dependent on the preceding columns")]
    RankDeficient { column: usize },
    #[error("Jacobi SVD did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("singular triangular system")]
    Singular,
}
