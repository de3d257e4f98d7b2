//! SVD-MPE and classical MPE over a window of `k + 2` consecutive iterates.
//!
//! Both methods factor the difference matrix `U_k = [u_n | ... | u_{n+k}]`
//! once by modified Gram-Schmidt and then work only with the small
//! triangular factor:
//!
//! 1. `U_k = Q_k R_k`
//! 2. `R_k = Y diag(sigma) H^T` (SVD-MPE only)
//! 3. `c` from the smallest right singular vector (SVD-MPE) or from the
//!    triangular least-squares solve with `c_k = 1` (MPE); `gamma = c / sum(c)`
//! 4. `xi_j = xi_{j-1} - gamma_j`, `eta = R_{k-1} xi`, `s = x_n + Q_{k-1} eta`
//!
//! With `alpha = sum(c)` and `|c| = 1`, the residual of `s` for a linear
//! iteration has norm `sigma_min / |alpha|` and comes for free.

use std::fmt;

use thiserror::Error;

use crate::linalg::{
    mgs_qr_trailing, norm2, svd_small_with, DenseVector, LinalgError, QrFactors, SmallSvd,
    SvdOptions, TallMatrix, UpperTriangular,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtrapolationError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("window needs {needed} iterates but only {available} were given")]
    NotEnoughIterates { needed: usize, available: usize },
    #[error("k = {k} is too large for vectors of dimension {dim}")]
    WindowTooLarge { k: usize, dim: usize },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("iterate {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("coefficient sum {alpha:e} is too close to zero")]
    AlphaNearZero { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    SvdMpe,
    Mpe,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::SvdMpe => "svd-mpe",
            Method::Mpe => "mpe",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Column `j` of `U_k` is dependent when `r_jj <= rank_tol * r_00`.
    pub rank_tol: f64,
    /// `|alpha| <= alpha_tol * |c|_1` is rejected.
    pub alpha_tol: f64,
    /// `(sigma_{k-1} - sigma_k) / sigma_0` at or below this flags a
    /// non-simple smallest singular value.
    pub sigma_gap_tol: f64,
    pub svd: SvdOptions,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_tol: 1e-13,
            alpha_tol: 1e-12,
            sigma_gap_tol: 1e-10,
            svd: SvdOptions::default(),
        }
    }
}

/// Iterates `x_n, ..., x_{n+k+1}` together with their first differences.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateWindow {
    n: usize,
    iterates: Vec<DenseVector>,
    differences: TallMatrix,
}

impl IterateWindow {
    /// Takes ownership of `x_n, ..., x_{n+k+1}`.
    pub fn from_iterates(n: usize, iterates: Vec<DenseVector>) -> Result<Self, ExtrapolationError> {
        if iterates.len() < 3 {
            return Err(if iterates.len() == 2 {
                ExtrapolationError::InvalidK
            } else {
                ExtrapolationError::NotEnoughIterates {
                    needed: 3,
                    available: iterates.len(),
                }
            });
        }
        let dim = iterates[0].len();
        for (index, x) in iterates.iter().enumerate() {
            if x.len() != dim {
                return Err(ExtrapolationError::DimensionMismatch {
                    index,
                    expected: dim,
                    found: x.len(),
                });
            }
            if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
                return Err(LinalgError::NonFinite { index: pos }.into());
            }
        }
        let k = iterates.len() - 2;
        // k = dim is allowed: U_k then has rank <= k and the extrapolation
        // terminates exactly for linear problems.
        if k > dim {
            return Err(ExtrapolationError::WindowTooLarge { k, dim });
        }
        let differences =
            TallMatrix::from_columns(iterates.windows(2).map(|w| w[1].sub(&w[0])).collect())?;
        Ok(Self {
            n,
            iterates,
            differences,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.iterates.len() - 2
    }

    pub fn dim(&self) -> usize {
        self.differences.nrows()
    }

    /// `x_n, ..., x_{n+k+1}`
    pub fn iterates(&self) -> &[DenseVector] {
        &self.iterates
    }

    /// `U_k`, whose column `j` is `x_{n+j+1} - x_{n+j}`.
    pub fn differences(&self) -> &TallMatrix {
        &self.differences
    }

    /// `sum_i gamma_i x_{n+i}` over `i = 0..=k`, evaluated directly.
    pub fn combine(&self, gamma: &[f64]) -> DenseVector {
        assert_eq!(gamma.len(), self.k() + 1);
        let mut s = DenseVector::zeros(self.dim());
        for (g, x) in gamma.iter().zip(&self.iterates) {
            s.axpy(*g, x);
        }
        s
    }

    /// Drops the last iterate, giving the window for `k - 1` at the same `n`.
    pub fn shrink(&self) -> Result<Self, ExtrapolationError> {
        let k = self.k();
        Self::from_iterates(self.n, self.iterates[..k + 1].to_vec())
    }
}

/// Builds the window for `x_n, ..., x_{n+k+1}` out of a longer stream.
pub fn build_window(
    iterates: &[DenseVector],
    n: usize,
    k: usize,
) -> Result<IterateWindow, ExtrapolationError> {
    if k == 0 {
        return Err(ExtrapolationError::InvalidK);
    }
    let needed = n + k + 2;
    if iterates.len() < needed {
        return Err(ExtrapolationError::NotEnoughIterates {
            needed,
            available: iterates.len(),
        });
    }
    IterateWindow::from_iterates(n, iterates[n..needed].to_vec())
}

/// `c`, its sum `alpha`, `gamma = c / alpha`, and the partial sums `xi` and
/// `eta = R_{k-1} xi` used to assemble `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub c: Vec<f64>,
    pub alpha: f64,
    pub gamma: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

impl CoefficientSet {
    /// Derives `alpha`, `gamma`, `xi` and `eta` from `c`.
    pub fn from_c(c: Vec<f64>, r: &UpperTriangular, alpha_tol: f64) -> Result<Self, ExtrapolationError> {
        let k = c.len() - 1;
        assert_eq!(r.size(), k + 1);
        let mut alpha = 0.0;
        let mut l1 = 0.0;
        for v in &c {
            alpha += v;
            l1 += v.abs();
        }
        if !(alpha.abs() > alpha_tol * l1) {
            return Err(ExtrapolationError::AlphaNearZero { alpha });
        }
        let gamma: Vec<f64> = c.iter().map(|v| v / alpha).collect();
        let mut xi = Vec::with_capacity(k);
        let mut prev = 1.0;
        for g in &gamma[..k] {
            prev -= g;
            xi.push(prev);
        }
        let eta = r.leading(k).mul_vec(&xi);
        Ok(Self {
            c,
            alpha,
            gamma,
            xi,
            eta,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationResult {
    pub s: DenseVector,
    pub coeffs: CoefficientSet,
    /// `|U_k c|` for the unit-norm `c`; the smallest singular value for SVD-MPE.
    pub sigma_min: f64,
    /// `sigma_min / |alpha|`
    pub residual_estimate: f64,
    pub method: Method,
    /// Set when the smallest singular value is not separated from the next
    /// one; `c` is then one admissible choice among several.
    pub degenerate_sigma: bool,
}

/// The QR and SVD that SVD-MPE computes on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFactors {
    pub qr: QrFactors,
    pub svd: SmallSvd,
}

pub fn factorize(window: &IterateWindow, cfg: &ToleranceConfig) -> Result<WindowFactors, ExtrapolationError> {
    let qr = mgs_qr_trailing(window.differences(), cfg.rank_tol)?;
    let svd = svd_small_with(qr.r(), cfg.svd)?;
    Ok(WindowFactors { qr, svd })
}

pub fn svd_mpe(window: &IterateWindow, cfg: &ToleranceConfig) -> Result<ExtrapolationResult, ExtrapolationError> {
    let factors = factorize(window, cfg)?;
    svd_mpe_with_factors(window, &factors, cfg)
}

/// SVD-MPE from precomputed factors of the window's `U_k`.
pub fn svd_mpe_with_factors(
    window: &IterateWindow,
    factors: &WindowFactors,
    cfg: &ToleranceConfig,
) -> Result<ExtrapolationResult, ExtrapolationError> {
    let WindowFactors { qr, svd } = factors;
    let k = window.k();
    let sigma = svd.sigma();
    let sigma_min = sigma[k];
    let degenerate_sigma = (sigma[k - 1] - sigma[k]) <= cfg.sigma_gap_tol * sigma[0];

    let coeffs = CoefficientSet::from_c(svd.h_min(), qr.r(), cfg.alpha_tol)?;
    let s = assemble(window, qr, &coeffs.eta);
    Ok(ExtrapolationResult {
        s,
        residual_estimate: sigma_min / coeffs.alpha.abs(),
        coeffs,
        sigma_min,
        method: Method::SvdMpe,
        degenerate_sigma,
    })
}

/// Classical MPE: `c_k = 1` and `c' = (c_0..c_{k-1})` minimizes
/// `|U_{k-1} c' + u_{n+k}|`, solved through the leading block of the same
/// QR. The stored `c` is rescaled to unit norm so that
/// `sigma_min / |alpha|` is again `|U_k gamma|`.
pub fn mpe(window: &IterateWindow, cfg: &ToleranceConfig) -> Result<ExtrapolationResult, ExtrapolationError> {
    let qr = mgs_qr_trailing(window.differences(), cfg.rank_tol)?;
    let k = window.k();
    let r = qr.r();
    let rhs: Vec<f64> = r.column_head(k, k).iter().map(|v| -v).collect();
    let mut c = r.leading(k).solve(&rhs)?;
    c.push(1.0);
    let scale = norm2(&c);
    let c: Vec<f64> = c.iter().map(|v| v / scale).collect();
    let sigma_min = norm2(&r.mul_vec(&c));

    let coeffs = CoefficientSet::from_c(c, r, cfg.alpha_tol)?;
    let s = assemble(window, &qr, &coeffs.eta);
    Ok(ExtrapolationResult {
        s,
        residual_estimate: sigma_min / coeffs.alpha.abs(),
        coeffs,
        sigma_min,
        method: Method::Mpe,
        degenerate_sigma: false,
    })
}

/// Dispatches on `method`.
pub fn extrapolate(
    method: Method,
    window: &IterateWindow,
    cfg: &ToleranceConfig,
) -> Result<ExtrapolationResult, ExtrapolationError> {
    match method {
        Method::SvdMpe => svd_mpe(window, cfg),
        Method::Mpe => mpe(window, cfg),
    }
}

/// Residual norm of `s` predicted from the factorization alone. Exact for
/// linear iterations; approximate close to convergence for nonlinear ones.
pub fn residual_estimate(result: &ExtrapolationResult) -> f64 {
    result.residual_estimate
}

/// `s = x_n + sum_i eta_i q_i`, `i < k`.
fn assemble(window: &IterateWindow, qr: &QrFactors, eta: &[f64]) -> DenseVector {
    let mut s = window.iterates()[0].clone();
    for (e, q) in eta.iter().zip(qr.q().columns()) {
        s.axpy(*e, q);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::new(x.to_vec()).unwrap()
    }

    /// `x_{m+1} = diag(0.5, 0.25) x_m + d`, solution `[1, 1]`.
    fn diag_stream(x0: [f64; 2], len: usize) -> Vec<DenseVector> {
        let mut xs = vec![v(&x0)];
        for _ in 1..len {
            let x = xs.last().unwrap();
            xs.push(v(&[0.5 * x[0] + 0.5, 0.25 * x[1] + 0.75]));
        }
        xs
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn window_differences() {
        let xs = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[1.0, 1.0])];
        let w = build_window(&xs, 0, 1).unwrap();
        assert_eq!(w.differences().column(0).as_slice(), &[1.0, 0.0]);
        assert_eq!(w.differences().column(1).as_slice(), &[0.0, 1.0]);
        assert_eq!(w.k(), 1);
    }

    #[test]
    fn constant_sequence_is_rank_deficient_at_column_zero() {
        let xs = vec![v(&[2.0, 3.0]); 4];
        let w = build_window(&xs, 0, 2).unwrap();
        assert!(w.differences().columns().iter().all(|c| c.norm() == 0.0));
        let err = svd_mpe(&w, &ToleranceConfig::default()).unwrap_err();
        assert_eq!(err, ExtrapolationError::Linalg(LinalgError::RankDeficient { column: 0 }));
    }

    #[test]
    fn window_errors() {
        let xs = vec![v(&[0.0]), v(&[1.0]), v(&[1.5])];
        assert_eq!(build_window(&xs, 0, 0), Err(ExtrapolationError::InvalidK));
        assert_eq!(
            build_window(&xs, 1, 1),
            Err(ExtrapolationError::NotEnoughIterates { needed: 4, available: 3 })
        );
        let xs4 = vec![v(&[0.0]), v(&[1.0]), v(&[1.5]), v(&[1.75])];
        assert_eq!(
            build_window(&xs4, 0, 2),
            Err(ExtrapolationError::WindowTooLarge { k: 2, dim: 1 })
        );
        let ragged = vec![v(&[0.0]), v(&[1.0, 2.0]), v(&[1.5])];
        assert!(matches!(
            build_window(&ragged, 0, 1),
            Err(ExtrapolationError::DimensionMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn orthogonal_columns_case() {
        // U_1 = [[2, 0], [0, 1]]: c = e_1, gamma = [0, 1], so s = x_1.
        let xs = vec![v(&[0.0, 0.0]), v(&[2.0, 0.0]), v(&[2.0, 1.0])];
        let w = build_window(&xs, 0, 1).unwrap();
        let cfg = ToleranceConfig::default();
        let res = svd_mpe(&w, &cfg).unwrap();
        assert_eq!(res.coeffs.c, vec![0.0, 1.0]);
        assert_eq!(res.coeffs.alpha, 1.0);
        assert_eq!(res.coeffs.gamma, vec![0.0, 1.0]);
        assert_eq!(res.coeffs.xi, vec![1.0]);
        assert_eq!(res.coeffs.eta, vec![2.0]);
        assert_eq!(res.s.as_slice(), &[2.0, 0.0]);
        assert_eq!(res.sigma_min, 1.0);
        assert_eq!(w.combine(&res.coeffs.gamma), res.s);

        let m = mpe(&w, &cfg).unwrap();
        assert!(close(&m.coeffs.gamma, &[0.0, 1.0], 1e-15));
        assert!(close(&m.s, &[2.0, 0.0], 1e-15));
    }

    #[test]
    fn finite_termination_degree_two() {
        let xs = diag_stream([0.0, 0.0], 4);
        let w = build_window(&xs, 0, 2).unwrap();
        let cfg = ToleranceConfig::default();
        for res in [svd_mpe(&w, &cfg).unwrap(), mpe(&w, &cfg).unwrap()] {
            assert!(close(&res.s, &[1.0, 1.0], 1e-12), "{:?}", res.s);
            let explicit = w.differences().mul_vec(&res.coeffs.gamma).norm();
            assert!(res.residual_estimate <= 1e-12);
            assert!(explicit <= 1e-12);
        }
    }

    #[test]
    fn finite_termination_degree_one() {
        let xs = diag_stream([1.0, 0.0], 3);
        let w = build_window(&xs, 0, 1).unwrap();
        let res = svd_mpe(&w, &ToleranceConfig::default()).unwrap();
        assert!(close(&res.s, &[1.0, 1.0], 1e-12), "{:?}", res.s);
    }

    #[test]
    fn assembly_routes_agree() {
        let xs = diag_stream([-3.0, 5.0], 5);
        let w = build_window(&xs, 1, 1).unwrap();
        let res = svd_mpe(&w, &ToleranceConfig::default()).unwrap();
        let direct = w.combine(&res.coeffs.gamma);
        let scale = direct.norm_max();
        assert!(close(&direct, &res.s, 1e-13 * scale));
    }

    #[test]
    fn phase_of_c_is_irrelevant() {
        let xs = diag_stream([-3.0, 5.0], 4);
        let w = build_window(&xs, 0, 1).unwrap();
        let f = factorize(&w, &ToleranceConfig::default()).unwrap();
        let c = f.svd.h_min();
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        let a = CoefficientSet::from_c(c, f.qr.r(), 1e-12).unwrap();
        let b = CoefficientSet::from_c(neg, f.qr.r(), 1e-12).unwrap();
        assert_eq!(a.gamma, b.gamma);
        assert_eq!(a.eta, b.eta);
        assert_eq!(a.alpha, -b.alpha);
    }

    #[test]
    fn alpha_near_zero_is_rejected() {
        let r = UpperTriangular::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let c = vec![1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()];
        assert!(matches!(
            CoefficientSet::from_c(c, &r, 1e-12),
            Err(ExtrapolationError::AlphaNearZero { .. })
        ));
    }

    #[test]
    fn tied_singular_values_are_flagged() {
        // U_1 has orthogonal columns of equal length: sigma_0 = sigma_1.
        let xs = vec![v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.0, 0.0]), v(&[1.0, 1.0, 0.0])];
        let w = build_window(&xs, 0, 1).unwrap();
        let res = svd_mpe(&w, &ToleranceConfig::default()).unwrap();
        assert!(res.degenerate_sigma);
        let sum: f64 = res.coeffs.gamma.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
    }
}
