//! Cycling and sliding-window drivers.
//!
//! A *cycle* generates `x_1, ..., x_{n+k+1}` from the current `x_0`,
//! extrapolates over `x_n, ..., x_{n+k+1}`, and restarts from the
//! extrapolant until the accuracy test passes. A *sweep* keeps one
//! un-restarted stream and slides the window start `n` along it.

use std::fmt;

use thiserror::Error;

use crate::extrapolation::{
    build_window, extrapolate, ExtrapolationError, ExtrapolationResult, IterateWindow, Method,
    ToleranceConfig,
};
use crate::linalg::{norm2, DenseVector, LinalgError};
use crate::problems::FixedPointProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CycleMethod {
    Extrapolate(Method),
    /// No acceleration: each cycle just takes `n + k + 1` plain steps.
    Plain,
}

impl CycleMethod {
    pub const SVD_MPE: Self = CycleMethod::Extrapolate(Method::SvdMpe);
    pub const MPE: Self = CycleMethod::Extrapolate(Method::Mpe);

    pub fn label(self) -> &'static str {
        match self {
            CycleMethod::Extrapolate(m) => m.label(),
            CycleMethod::Plain => "plain",
        }
    }
}

impl fmt::Display for CycleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// What a cycle does when extrapolation fails on a rank-deficient window or
/// a vanishing coefficient sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneracyPolicy {
    /// Stop and return the trace so far.
    Fail,
    /// Retry the same stream with `k - 1`, down to `k = 1`.
    #[default]
    ShrinkK,
    /// Continue from `x_{n+k+1}` as if the cycle were plain iteration.
    Restart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopMetric {
    /// `|f(s) - s|`, evaluated explicitly.
    #[default]
    TrueResidual,
    /// `sigma_min / |alpha|`; plain cycles fall back to the true residual.
    Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleConfig {
    pub n: usize,
    pub k: usize,
    pub max_cycles: usize,
    pub stop_residual: f64,
    pub method: CycleMethod,
    pub on_degeneracy: DegeneracyPolicy,
    pub stop_metric: StopMetric,
    pub tolerances: ToleranceConfig,
    /// Keep every `s^(r)` in the trace.
    pub keep_iterates: bool,
}

impl CycleConfig {
    pub fn new(method: CycleMethod, n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            max_cycles: 100,
            stop_residual: 0.0,
            method,
            on_degeneracy: DegeneracyPolicy::default(),
            stop_metric: StopMetric::default(),
            tolerances: ToleranceConfig::default(),
            keep_iterates: false,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), DriverError> {
        if self.k == 0 {
            return Err(DriverError::InvalidConfig {
                field: "k",
                reason: "k must be at least 1".into(),
            });
        }
        if self.k + 1 > dim {
            return Err(DriverError::InvalidConfig {
                field: "k",
                reason: format!("k + 1 = {} exceeds the problem dimension {dim}", self.k + 1),
            });
        }
        if self.max_cycles == 0 {
            return Err(DriverError::InvalidConfig {
                field: "max_cycles",
                reason: "at least one cycle is required".into(),
            });
        }
        if !(self.stop_residual >= 0.0) {
            return Err(DriverError::InvalidConfig {
                field: "stop_residual",
                reason: "must be a non-negative number".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverError {
    #[error("invalid `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("initial vector has dimension {found}, problem has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Why a run stopped before passing its accuracy test.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunFailure {
    #[error(transparent)]
    Extrapolation(#[from] ExtrapolationError),
    #[error("iteration produced a non-finite vector")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CycleOutcome {
    Converged,
    MaxCycles,
    Failed(RunFailure),
}

/// Telemetry for cycle `r` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle: usize,
    pub s: Option<DenseVector>,
    pub residual_estimate: Option<f64>,
    pub true_residual_norm: f64,
    pub error_norm: Option<f64>,
    pub sigma_min: Option<f64>,
    pub alpha: Option<f64>,
    /// Function evaluations consumed up to and including this cycle,
    /// `r (n + k + 1)`. The `f(s)` used for the residual check is reused as
    /// the next cycle's first step.
    pub f_evals: usize,
    /// Window size actually used (smaller than `k` after shrinking).
    pub k_used: usize,
    pub degenerate_sigma: bool,
    /// True when the extrapolation failed and the cycle fell back to
    /// `x_{n+k+1}` under [`DegeneracyPolicy::Restart`].
    pub restarted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleTrace {
    pub method: CycleMethod,
    pub records: Vec<CycleRecord>,
    pub outcome: CycleOutcome,
    /// The last accepted approximation.
    pub solution: DenseVector,
}

fn finite(v: Vec<f64>) -> Result<DenseVector, RunFailure> {
    DenseVector::new(v).map_err(|_| RunFailure::NonFinite)
}

fn error_norm<P: FixedPointProblem + ?Sized>(problem: &P, x: &[f64]) -> Option<f64> {
    problem.known_solution().map(|s| {
        let d: Vec<f64> = x.iter().zip(s).map(|(a, b)| a - b).collect();
        norm2(&d)
    })
}

fn shrink_until_ok(
    method: Method,
    mut window: IterateWindow,
    cfg: &ToleranceConfig,
) -> Result<(ExtrapolationResult, usize), ExtrapolationError> {
    loop {
        match extrapolate(method, &window, cfg) {
            Ok(res) => return Ok((res, window.k())),
            Err(e) if is_degeneracy(&e) && window.k() > 1 => window = window.shrink()?,
            Err(e) => return Err(e),
        }
    }
}

fn is_degeneracy(e: &ExtrapolationError) -> bool {
    matches!(
        e,
        ExtrapolationError::AlphaNearZero { .. }
            | ExtrapolationError::Linalg(LinalgError::RankDeficient { .. })
    )
}

/// Runs the cycling strategy from `x0`.
pub fn run_cycles<P: FixedPointProblem + ?Sized>(
    problem: &P,
    x0: &DenseVector,
    cfg: &CycleConfig,
) -> Result<CycleTrace, DriverError> {
    let dim = problem.dim();
    cfg.validate(dim)?;
    if x0.len() != dim {
        return Err(DriverError::DimensionMismatch {
            expected: dim,
            found: x0.len(),
        });
    }
    let steps = cfg.n + cfg.k + 1;
    let mut records = Vec::new();
    let mut start = x0.clone();
    let mut f_start: Option<Vec<f64>> = None;
    let mut f_evals = 0;
    let mut outcome = CycleOutcome::MaxCycles;

    for cycle in 1..=cfg.max_cycles {
        match run_one_cycle(problem, cfg, &start, f_start.take(), steps) {
            Ok(step) => {
                f_evals += steps;
                let stop_value = match cfg.stop_metric {
                    StopMetric::TrueResidual => step.true_residual,
                    StopMetric::Estimate => step.estimate.unwrap_or(step.true_residual),
                };
                records.push(CycleRecord {
                    cycle,
                    s: cfg.keep_iterates.then(|| step.s.clone()),
                    residual_estimate: step.estimate,
                    true_residual_norm: step.true_residual,
                    error_norm: error_norm(problem, &step.s),
                    sigma_min: step.sigma_min,
                    alpha: step.alpha,
                    f_evals,
                    k_used: step.k_used,
                    degenerate_sigma: step.degenerate,
                    restarted: step.restarted,
                });
                start = step.s;
                f_start = Some(step.f_s);
                if stop_value <= cfg.stop_residual {
                    outcome = CycleOutcome::Converged;
                    break;
                }
            }
            Err(failure) => {
                outcome = CycleOutcome::Failed(failure);
                break;
            }
        }
    }

    Ok(CycleTrace {
        method: cfg.method,
        records,
        outcome,
        solution: start,
    })
}

struct CycleStep {
    s: DenseVector,
    f_s: Vec<f64>,
    true_residual: f64,
    estimate: Option<f64>,
    sigma_min: Option<f64>,
    alpha: Option<f64>,
    k_used: usize,
    degenerate: bool,
    restarted: bool,
}

fn run_one_cycle<P: FixedPointProblem + ?Sized>(
    problem: &P,
    cfg: &CycleConfig,
    start: &DenseVector,
    f_start: Option<Vec<f64>>,
    steps: usize,
) -> Result<CycleStep, RunFailure> {
    let mut stream = Vec::with_capacity(steps + 1);
    stream.push(start.clone());
    let first = match f_start {
        Some(v) => v,
        None => problem.apply(start),
    };
    stream.push(finite(first)?);
    for _ in 1..steps {
        let next = problem.apply(stream.last().expect("non-empty"));
        stream.push(finite(next)?);
    }

    let mut estimate = None;
    let mut sigma_min = None;
    let mut alpha = None;
    let mut k_used = cfg.k;
    let mut degenerate = false;
    let mut restarted = false;

    let s = match cfg.method {
        CycleMethod::Plain => stream.pop().expect("non-empty"),
        CycleMethod::Extrapolate(method) => {
            let last = stream.last().expect("non-empty").clone();
            let window = IterateWindow::from_iterates(cfg.n, stream.split_off(cfg.n))?;
            let attempt = match cfg.on_degeneracy {
                DegeneracyPolicy::ShrinkK => shrink_until_ok(method, window, &cfg.tolerances),
                _ => extrapolate(method, &window, &cfg.tolerances).map(|r| (r, cfg.k)),
            };
            match attempt {
                Ok((res, k)) => {
                    estimate = Some(res.residual_estimate);
                    sigma_min = Some(res.sigma_min);
                    alpha = Some(res.coeffs.alpha);
                    degenerate = res.degenerate_sigma;
                    k_used = k;
                    finite(res.s.into_vec())?
                }
                Err(e) if cfg.on_degeneracy == DegeneracyPolicy::Restart && is_degeneracy(&e) => {
                    restarted = true;
                    last
                }
                Err(e) => return Err(e.into()),
            }
        }
    };

    let f_s = problem.apply(&s);
    let r: Vec<f64> = f_s.iter().zip(s.iter()).map(|(a, b)| a - b).collect();
    let true_residual = norm2(&r);
    if !true_residual.is_finite() {
        return Err(RunFailure::NonFinite);
    }
    Ok(CycleStep {
        s,
        f_s,
        true_residual,
        estimate,
        sigma_min,
        alpha,
        k_used,
        degenerate,
        restarted,
    })
}

/// One window position of a sweep. Failed windows keep `failure` and leave
/// the numeric fields empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub error_norm: Option<f64>,
    pub true_residual_norm: Option<f64>,
    pub residual_estimate: Option<f64>,
    pub sigma_min: Option<f64>,
    pub alpha: Option<f64>,
    pub failure: Option<ExtrapolationError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrace {
    pub method: CycleMethod,
    pub k: usize,
    pub records: Vec<SweepRecord>,
}

impl SweepTrace {
    pub fn has_gaps(&self) -> bool {
        self.records.iter().any(|r| r.failure.is_some())
    }
}

/// Generates `x_0, ..., x_{len-1}` by plain iteration.
pub fn iterate_stream<P: FixedPointProblem + ?Sized>(
    problem: &P,
    x0: &DenseVector,
    len: usize,
) -> Result<Vec<DenseVector>, RunFailure> {
    let mut stream = Vec::with_capacity(len);
    stream.push(x0.clone());
    while stream.len() < len {
        let next = problem.apply(stream.last().expect("non-empty"));
        stream.push(finite(next)?);
    }
    Ok(stream)
}

/// Extrapolates `s_{n,k}` for `n = 0..=n_max` from a single stream.
/// For [`CycleMethod::Plain`] the record at `n` describes `x_{n+k+1}`.
pub fn run_sweep<P: FixedPointProblem + ?Sized>(
    problem: &P,
    x0: &DenseVector,
    k: usize,
    n_max: usize,
    method: CycleMethod,
    tolerances: &ToleranceConfig,
) -> Result<SweepTrace, DriverError> {
    let stream = iterate_stream(problem, x0, n_max + k + 2).map_err(|_| DriverError::InvalidConfig {
        field: "x0",
        reason: "iteration diverged to non-finite values".into(),
    })?;
    sweep_over_stream(problem, &stream, k, n_max, method, tolerances)
}

/// Like [`run_sweep`] over an already generated stream, so several methods
/// can share it.
pub fn sweep_over_stream<P: FixedPointProblem + ?Sized>(
    problem: &P,
    stream: &[DenseVector],
    k: usize,
    n_max: usize,
    method: CycleMethod,
    tolerances: &ToleranceConfig,
) -> Result<SweepTrace, DriverError> {
    let dim = problem.dim();
    if k == 0 || k + 1 > dim {
        return Err(DriverError::InvalidConfig {
            field: "k",
            reason: format!("need 1 <= k and k + 1 <= {dim}"),
        });
    }
    if stream.len() < n_max + k + 2 {
        return Err(DriverError::InvalidConfig {
            field: "n_max",
            reason: format!("stream of {} iterates is too short", stream.len()),
        });
    }
    if let Some(x) = stream.iter().find(|x| x.len() != dim) {
        return Err(DriverError::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }

    let residual_of = |x: &[f64]| norm2(&problem.residual(x));
    let mut records = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let record = match method {
            CycleMethod::Plain => {
                let x = &stream[n + k + 1];
                SweepRecord {
                    n,
                    error_norm: error_norm(problem, x),
                    true_residual_norm: Some(residual_of(x)),
                    residual_estimate: None,
                    sigma_min: None,
                    alpha: None,
                    failure: None,
                }
            }
            CycleMethod::Extrapolate(m) => {
                match build_window(stream, n, k).and_then(|w| extrapolate(m, &w, tolerances)) {
                    Ok(res) => SweepRecord {
                        n,
                        error_norm: error_norm(problem, &res.s),
                        true_residual_norm: Some(residual_of(&res.s)),
                        residual_estimate: Some(res.residual_estimate),
                        sigma_min: Some(res.sigma_min),
                        alpha: Some(res.coeffs.alpha),
                        failure: None,
                    },
                    Err(e) => SweepRecord {
                        n,
                        error_norm: None,
                        true_residual_norm: None,
                        residual_estimate: None,
                        sigma_min: None,
                        alpha: None,
                        failure: Some(e),
                    },
                }
            }
        };
        records.push(record);
    }
    Ok(SweepTrace { method, k, records })
}
