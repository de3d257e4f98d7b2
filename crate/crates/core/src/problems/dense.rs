use super::{FixedPointProblem, ProblemError};
use crate::linalg::SmallMatrix;

/// `x -> T x + d` with a dense `T`.
#[derive(Debug, Clone)]
pub struct DenseLinearProblem {
    t: SmallMatrix,
    d: Vec<f64>,
    solution: Option<Vec<f64>>,
}

impl DenseLinearProblem {
    pub fn new(t: SmallMatrix, d: Vec<f64>) -> Result<Self, ProblemError> {
        let n = t.nrows();
        if n == 0 {
            return Err(ProblemError::Empty);
        }
        if t.ncols() != n {
            return Err(ProblemError::DimensionMismatch {
                expected: n,
                found: t.ncols(),
            });
        }
        if d.len() != n {
            return Err(ProblemError::DimensionMismatch {
                expected: n,
                found: d.len(),
            });
        }
        Ok(Self { t, d, solution: None })
    }

    /// Builds `d = (I - T) s` so that `s` is the fixed point.
    pub fn with_solution(t: SmallMatrix, solution: Vec<f64>) -> Result<Self, ProblemError> {
        if solution.len() != t.ncols() {
            return Err(ProblemError::DimensionMismatch {
                expected: t.ncols(),
                found: solution.len(),
            });
        }
        let ts = t.mul_vec(&solution);
        let d = solution.iter().zip(&ts).map(|(s, v)| s - v).collect();
        let mut p = Self::new(t, d)?;
        p.solution = Some(solution);
        Ok(p)
    }

    /// Attaches a reference solution, used only for error norms. It is not
    /// checked against `d`.
    pub fn with_known_solution(mut self, solution: Vec<f64>) -> Result<Self, ProblemError> {
        if solution.len() != self.d.len() {
            return Err(ProblemError::DimensionMismatch {
                expected: self.d.len(),
                found: solution.len(),
            });
        }
        self.solution = Some(solution);
        Ok(self)
    }

    pub fn t(&self) -> &SmallMatrix {
        &self.t
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }
}

impl FixedPointProblem for DenseLinearProblem {
    fn dim(&self) -> usize {
        self.d.len()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.t.mul_vec(x);
        for (yi, di) in y.iter_mut().zip(&self.d) {
            *yi += di;
        }
        y
    }

    fn known_solution(&self) -> Option<&[f64]> {
        self.solution.as_deref()
    }
}
