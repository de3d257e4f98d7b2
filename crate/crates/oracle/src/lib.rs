//! Reference computations for testing `svd-mpe`.
//!
//! Everything here is deliberately slow and independent of the fast path:
//! determinants by cofactor expansion, SVDs via symmetric eigenproblems of
//! Gram matrices, Gaussian elimination for direct solves, and classical
//! Gram-Schmidt (applied twice) for Krylov bases.

mod dense;
mod determinant;
mod eigen;
mod generators;
mod krylov;
pub mod suite;

use thiserror::Error;

pub use dense::{invert, solve};
pub use determinant::{
    det_cofactor, det_gamma, det_representation, det_representation_scalar, mpe_weights,
    svd_mpe_weights_shifted_gram, svd_mpe_weights_left_vectors, svd_mpe_weights_left_vectors_via_r,
};
pub use eigen::{small_svd_oracle, symmetric_eigen};
pub use generators::{random_diagonalizable, random_linear, LinearInstance};
pub use krylov::{krylov_remainder, left_orthogonality};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("denominator determinant D(1, ..., 1) = {value:e} is numerically zero")]
    SingularDenominator { value: f64 },
    #[error("gap condition violated: sigma_kk = {sigma_kk:e} >= sigma_(k-1,k-1) = {sigma_prev:e}")]
    GapViolated { sigma_kk: f64, sigma_prev: f64 },
    #[error("Jacobi eigen-iteration did not converge")]
    NoConvergence,
    #[error("singular matrix")]
    Singular,
}
