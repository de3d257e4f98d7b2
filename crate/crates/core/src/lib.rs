//! SVD-based minimal polynomial extrapolation (SVD-MPE) and classical MPE
//! for accelerating slowly converging fixed-point iterations `x = f(x)`.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: the dense kernels (MGS QR, small one-sided Jacobi SVD).
//! - [`extrapolation`]: iterate windows and the two extrapolation methods.
//! - [`problems`]: fixed-point maps used for testing and experiments.
//! - [`driver`]: cycling and sliding-window sweep strategies.

pub mod driver;
pub mod extrapolation;
pub mod linalg;
pub mod problems;

pub use extrapolation::{
    build_window, mpe, residual_estimate, svd_mpe, CoefficientSet, ExtrapolationError,
    ExtrapolationResult, IterateWindow, Method, ToleranceConfig,
};
pub use linalg::{DenseVector, LinalgError};
pub use problems::FixedPointProblem;
