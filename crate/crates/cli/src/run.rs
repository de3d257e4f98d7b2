//! Runs a resolved experiment and collects trace rows.

use std::thread;

use serde::Serialize;
use svd_mpe::driver::{
    iterate_stream, run_cycles, sweep_over_stream, CycleConfig, CycleOutcome, CycleTrace, DriverError,
    SweepTrace,
};
use svd_mpe::problems::{BandedLinearProblem, ConvectionDiffusionProblem, Grid, Sweep};
use svd_mpe::{DenseVector, FixedPointProblem, ToleranceConfig};
use thiserror::Error;

use crate::config::{ConfigError, Experiment, ExperimentConfig, MethodTag};
use crate::system::SystemFile;

/// One row of a sweep trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub method: MethodTag,
    pub error_l2: Option<f64>,
    pub residual_estimate: Option<f64>,
    pub sigma_min: Option<f64>,
    pub alpha: Option<f64>,
}

/// One row of a cycling trace. `sweep` is set for the PDE experiments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleRow {
    pub cycle: usize,
    pub method: MethodTag,
    pub error_l2: Option<f64>,
    pub true_residual_l2: f64,
    pub residual_estimate: Option<f64>,
    pub sigma_min: Option<f64>,
    pub alpha: Option<f64>,
    pub cumulative_f_evals: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Rows {
    Sweep(Vec<SweepRow>),
    Cycle(Vec<CycleRow>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::Sweep(r) => r.len(),
            Rows::Cycle(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Final approximation of one PDE arm, for grid dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSolution {
    pub method: MethodTag,
    pub sweep: Sweep,
    pub grid: Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Rows,
    /// Numerical failures, one message per failed arm. Rows recorded before
    /// the failure are kept.
    pub failures: Vec<String>,
    /// Sweep windows that could not be extrapolated; their rows have empty
    /// numeric fields.
    pub gaps: Vec<String>,
    pub solutions: Vec<ArmSolution>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn driver_config(err: DriverError) -> ConfigError {
    match err {
        DriverError::InvalidConfig { field, reason } => ConfigError { field, reason },
        DriverError::DimensionMismatch { expected, found } => ConfigError {
            field: "system",
            reason: format!("x0 has length {found}, expected {expected}"),
        },
    }
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::LinearSweep => {
            let dim = cfg.dim.expect("validated");
            let problem = BandedLinearProblem::new(dim).map_err(|e| ConfigError {
                field: "dim",
                reason: e.to_string(),
            })?;
            linear_sweep(&problem, cfg)
        }
        Experiment::LinearCycle => {
            let dim = cfg.dim.expect("validated");
            let problem = BandedLinearProblem::new(dim).map_err(|e| ConfigError {
                field: "dim",
                reason: e.to_string(),
            })?;
            let x0 = DenseVector::zeros(dim);
            let arms = cfg.methods.iter().map(|m| (*m, &problem, &x0, None)).collect();
            cycles(cfg, arms)
        }
        Experiment::Pde | Experiment::PdeJacobi | Experiment::PdeGaussSeidel => {
            let sweeps: &[Sweep] = match cfg.experiment {
                Experiment::PdeJacobi => &[Sweep::Jacobi],
                Experiment::PdeGaussSeidel => &[Sweep::GaussSeidel],
                _ => &[Sweep::Jacobi, Sweep::GaussSeidel],
            };
            let nu = cfg.nu.expect("validated");
            let c = cfg.convection.expect("validated");
            let problems: Vec<ConvectionDiffusionProblem> = sweeps
                .iter()
                .map(|s| ConvectionDiffusionProblem::new(nu, c, *s))
                .collect::<Result<_, _>>()
                .map_err(|e| ConfigError {
                    field: "nu",
                    reason: e.to_string(),
                })?;
            let x0 = DenseVector::zeros(problems[0].dim());
            let mut arms = Vec::new();
            for p in &problems {
                for m in &cfg.methods {
                    arms.push((*m, p, &x0, Some(p.sweep())));
                }
            }
            cycles(cfg, arms)
        }
        Experiment::Custom => {
            let path = cfg.system.as_ref().expect("validated");
            let (problem, x0) = SystemFile::load(path)?.build()?;
            if cfg.k + 1 > problem.dim() {
                return Err(ConfigError {
                    field: "k",
                    reason: format!("k + 1 = {} exceeds N = {}", cfg.k + 1, problem.dim()),
                }
                .into());
            }
            let arms = cfg.methods.iter().map(|m| (*m, &problem, &x0, None)).collect();
            cycles(cfg, arms)
        }
    }
}

fn linear_sweep(problem: &BandedLinearProblem, cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let n_max = cfg.n_max.expect("validated");
    let x0 = DenseVector::zeros(problem.dim());
    let tol = ToleranceConfig::default();
    let stream = match iterate_stream(problem, &x0, n_max + cfg.k + 2) {
        Ok(s) => s,
        Err(e) => {
            return Ok(Report {
                rows: Rows::Sweep(Vec::new()),
                failures: vec![format!("iterate stream: {e}")],
                gaps: Vec::new(),
                solutions: Vec::new(),
            })
        }
    };
    let traces: Vec<Result<SweepTrace, DriverError>> = thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .methods
            .iter()
            .map(|m| {
                let stream = &stream;
                let tol = &tol;
                scope.spawn(move || sweep_over_stream(problem, stream, cfg.k, n_max, m.cycle_method(), tol))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep arm panicked")).collect()
    });

    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    for (method, trace) in cfg.methods.iter().zip(traces) {
        let trace = trace.map_err(driver_config)?;
        for r in trace.records {
            if let Some(f) = &r.failure {
                gaps.push(format!("{} n={}: {f}", method.label(), r.n));
            }
            rows.push(SweepRow {
                n: r.n,
                method: *method,
                error_l2: r.error_norm,
                residual_estimate: r.residual_estimate,
                sigma_min: r.sigma_min,
                alpha: r.alpha,
            });
        }
    }
    let order = |m: MethodTag| cfg.methods.iter().position(|x| *x == m).expect("listed");
    rows.sort_by_key(|r| (order(r.method), r.n));
    Ok(Report {
        rows: Rows::Sweep(rows),
        failures: Vec::new(),
        gaps,
        solutions: Vec::new(),
    })
}

type Arm<'a, P> = (MethodTag, &'a P, &'a DenseVector, Option<Sweep>);

fn cycles<P: FixedPointProblem>(cfg: &ExperimentConfig, arms: Vec<Arm<'_, P>>) -> Result<Report, RunError> {
    let results: Vec<Result<CycleTrace, DriverError>> = thread::scope(|scope| {
        let handles: Vec<_> = arms
            .iter()
            .map(|&(method, problem, x0, _)| {
                let mut cc = CycleConfig::new(method.cycle_method(), cfg.n, cfg.k);
                cc.max_cycles = cfg.max_cycles.expect("validated");
                cc.stop_residual = cfg.stop_residual.expect("validated");
                cc.on_degeneracy = cfg.on_degeneracy.policy();
                scope.spawn(move || run_cycles(problem, x0, &cc))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("cycle arm panicked")).collect()
    });

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut solutions = Vec::new();
    for ((method, problem, _, sweep), trace) in arms.iter().zip(results) {
        let trace = trace.map_err(driver_config)?;
        let arm = match sweep {
            Some(s) => format!("{} ({})", method.label(), s.label()),
            None => method.label().to_string(),
        };
        if let CycleOutcome::Failed(f) = &trace.outcome {
            failures.push(format!("{arm}: {f} after {} cycles", trace.records.len()));
        }
        for r in &trace.records {
            rows.push(CycleRow {
                cycle: r.cycle,
                method: *method,
                error_l2: r.error_norm,
                true_residual_l2: r.true_residual_norm,
                residual_estimate: r.residual_estimate,
                sigma_min: r.sigma_min,
                alpha: r.alpha,
                cumulative_f_evals: r.f_evals,
                sweep: sweep.map(Sweep::label),
            });
        }
        if let Some(s) = sweep {
            let nu = ((problem.dim() as f64).sqrt().round() as usize) + 1;
            if let Ok(grid) = Grid::from_vec(nu, trace.solution.into_vec()) {
                solutions.push(ArmSolution {
                    method: *method,
                    sweep: *s,
                    grid,
                });
            }
        }
    }
    let order = |m: MethodTag| cfg.methods.iter().position(|x| *x == m).expect("listed");
    rows.sort_by_key(|r| (r.sweep.unwrap_or(""), order(r.method), r.cycle));
    Ok(Report {
        rows: Rows::Cycle(rows),
        failures,
        gaps: Vec::new(),
        solutions,
    })
}
