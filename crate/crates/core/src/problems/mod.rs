//! Fixed-point maps `x -> f(x)`.
//!
//! [`FixedPointProblem`] is what the drivers iterate. Three families ship
//! with the crate: a dense linear iteration for small random tests, the
//! seven-band symmetric/persymmetric linear iteration, and the nonlinear
//! convection-diffusion finite-difference system with Jacobi and
//! Gauss-Seidel splittings.

mod banded;
mod convection;
mod dense;

use thiserror::Error;

pub use banded::BandedLinearProblem;
pub use convection::{
    build_forcing, exact_solution, gauss_seidel_sweep, jacobi_sweep, ConvectionDiffusionProblem,
    Grid, Sweep,
};
pub use dense::DenseLinearProblem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("grid parameter nu = {nu} is too small (need nu >= 4)")]
    GridTooSmall { nu: usize },
    #[error("problem dimension must be positive")]
    Empty,
}

/// A map `f: R^N -> R^N` whose fixed point is sought.
pub trait FixedPointProblem: Sync {
    fn dim(&self) -> usize;

    /// `f(x)`; `x.len()` equals [`dim`](Self::dim).
    fn apply(&self, x: &[f64]) -> Vec<f64>;

    /// The fixed point, when it is known in advance.
    fn known_solution(&self) -> Option<&[f64]> {
        None
    }

    /// `r(x) = f(x) - x`
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let fx = self.apply(x);
        fx.iter().zip(x).map(|(a, b)| a - b).collect()
    }
}

impl<P: FixedPointProblem + ?Sized> FixedPointProblem for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (**self).apply(x)
    }

    fn known_solution(&self) -> Option<&[f64]> {
        (**self).known_solution()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        (**self).residual(x)
    }
}
