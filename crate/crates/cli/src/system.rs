//! User-supplied linear systems for the `custom` experiment.

use std::path::Path;

use serde::Deserialize;
use svd_mpe::linalg::{norm2, SmallMatrix};
use svd_mpe::problems::DenseLinearProblem;
use svd_mpe::{DenseVector, FixedPointProblem};

use crate::config::ConfigError;

/// `{"t": [[...], ...], "d": [...], "solution": [...], "x0": [...]}`;
/// `solution` and `x0` are optional (`x0` defaults to zero).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub t: Vec<Vec<f64>>,
    pub d: Vec<f64>,
    #[serde(default)]
    pub solution: Option<Vec<f64>>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
}

fn bad(reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: "system",
        reason: reason.into(),
    }
}

impl SystemFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    /// Builds the problem and starting vector. A given `solution` must be a
    /// fixed point to `1e-10 (1 + |d|)`.
    pub fn build(self) -> Result<(DenseLinearProblem, DenseVector), ConfigError> {
        let t = SmallMatrix::from_rows(&self.t).map_err(|e| bad(format!("t: {e}")))?;
        let n = self.d.len();
        let d_norm = norm2(&self.d);
        let mut problem = DenseLinearProblem::new(t, self.d).map_err(|e| bad(e.to_string()))?;
        if let Some(s) = self.solution {
            problem = problem.with_known_solution(s).map_err(|e| bad(format!("solution: {e}")))?;
            let s = problem.known_solution().expect("just set");
            let r = norm2(&problem.residual(s));
            if !(r <= 1e-10 * (1.0 + d_norm)) {
                return Err(bad(format!("solution is not a fixed point (residual {r:e})")));
            }
        }
        let x0 = match self.x0 {
            Some(x) if x.len() != n => return Err(bad(format!("x0 has length {}, expected {n}", x.len()))),
            Some(x) => DenseVector::new(x).map_err(|e| bad(format!("x0: {e}")))?,
            None => DenseVector::zeros(n),
        };
        Ok((problem, x0))
    }
}
