//! Experiment configuration: defaults per experiment, overrides from flags
//! or a JSON file, and validation.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use svd_mpe::driver::{CycleMethod, DegeneracyPolicy};
use svd_mpe::Method;
use thiserror::Error;

/// Environment variable naming the directory for trace files when no
/// explicit output path is given.
pub const OUTPUT_DIR_ENV: &str = "SVDMPE_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Sliding window over one iterate stream of the banded problem.
    LinearSweep,
    /// Cycling on the banded problem.
    LinearCycle,
    /// Cycling on the convection-diffusion problem, both splittings.
    Pde,
    PdeJacobi,
    PdeGaussSeidel,
    /// Cycling on a user-supplied linear system `x = T x + d`.
    Custom,
}

impl Experiment {
    pub fn label(self) -> &'static str {
        match self {
            Experiment::LinearSweep => "linear-sweep",
            Experiment::LinearCycle => "linear-cycle",
            Experiment::Pde => "pde",
            Experiment::PdeJacobi => "pde-jacobi",
            Experiment::PdeGaussSeidel => "pde-gauss-seidel",
            Experiment::Custom => "custom",
        }
    }

    pub fn is_pde(self) -> bool {
        matches!(self, Experiment::Pde | Experiment::PdeJacobi | Experiment::PdeGaussSeidel)
    }

    pub fn is_banded(self) -> bool {
        matches!(self, Experiment::LinearSweep | Experiment::LinearCycle)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodTag {
    SvdMpe,
    Mpe,
    Plain,
}

impl MethodTag {
    pub fn label(self) -> &'static str {
        match self {
            MethodTag::SvdMpe => "svd-mpe",
            MethodTag::Mpe => "mpe",
            MethodTag::Plain => "plain",
        }
    }

    pub fn cycle_method(self) -> CycleMethod {
        match self {
            MethodTag::SvdMpe => CycleMethod::Extrapolate(Method::SvdMpe),
            MethodTag::Mpe => CycleMethod::Extrapolate(Method::Mpe),
            MethodTag::Plain => CycleMethod::Plain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyTag {
    Fail,
    ShrinkK,
    Restart,
}

impl PolicyTag {
    pub fn policy(self) -> DegeneracyPolicy {
        match self {
            PolicyTag::Fail => DegeneracyPolicy::Fail,
            PolicyTag::ShrinkK => DegeneracyPolicy::ShrinkK,
            PolicyTag::Restart => DegeneracyPolicy::Restart,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A fully resolved experiment. Fields that do not apply to the chosen
/// experiment are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Dimension `N` of the banded problem.
    pub dim: Option<usize>,
    /// Grid parameter of the PDE; `h = 1 / nu`, `N = (nu - 1)^2`.
    pub nu: Option<usize>,
    /// Convection coefficient `C` of the PDE.
    pub convection: Option<f64>,
    /// JSON file holding the custom system.
    pub system: Option<PathBuf>,
    pub n: usize,
    pub k: usize,
    /// Last window start of a sweep.
    pub n_max: Option<usize>,
    pub methods: Vec<MethodTag>,
    pub max_cycles: Option<usize>,
    pub stop_residual: Option<f64>,
    pub on_degeneracy: PolicyTag,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// File stem for dumping final PDE grids, one CSV per arm.
    pub grid_dump: Option<PathBuf>,
}

/// Optional overrides, as given on the command line or in a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub nu: Option<usize>,
    pub convection: Option<f64>,
    pub system: Option<PathBuf>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub n_max: Option<usize>,
    pub methods: Option<Vec<MethodTag>>,
    pub max_cycles: Option<usize>,
    pub stop_residual: Option<f64>,
    pub on_degeneracy: Option<PolicyTag>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub grid_dump: Option<PathBuf>,
}

/// Parses a config file: an object with an `experiment` tag plus any
/// [`Overrides`] fields. Unknown keys are rejected.
pub fn parse_config_file(text: &str) -> Result<(Experiment, Overrides), serde_json::Error> {
    #[derive(Deserialize)]
    struct Tag {
        experiment: Experiment,
    }
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let Tag { experiment } = serde_json::from_value(value.clone())?;
    if let Some(obj) = value.as_object_mut() {
        obj.remove("experiment");
    }
    Ok((experiment, serde_json::from_value(value)?))
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid value for `{field}`: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field,
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    /// Defaults for `experiment`: `N = 100, k = 5, n = 0..30` for the sweep,
    /// `N = 1000, k = 20` for linear cycling, `nu = 32, C = 20, k = 20` for
    /// the PDE.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            dim: None,
            nu: None,
            convection: None,
            system: None,
            n: 0,
            k: 20,
            n_max: None,
            methods: vec![MethodTag::SvdMpe, MethodTag::Mpe],
            max_cycles: Some(50),
            stop_residual: Some(1e-10),
            on_degeneracy: PolicyTag::ShrinkK,
            output: None,
            format: Format::Csv,
            grid_dump: None,
        };
        match experiment {
            Experiment::LinearSweep => {
                cfg.dim = Some(100);
                cfg.k = 5;
                cfg.n_max = Some(30);
                cfg.max_cycles = None;
                cfg.stop_residual = None;
            }
            Experiment::LinearCycle => cfg.dim = Some(1000),
            Experiment::Pde | Experiment::PdeJacobi | Experiment::PdeGaussSeidel => {
                cfg.nu = Some(32);
                cfg.convection = Some(20.0);
                cfg.stop_residual = Some(1e-12);
            }
            Experiment::Custom => cfg.k = 5,
        }
        cfg
    }

    /// Applies `o` on top of the defaults for `experiment`. Fields that the
    /// experiment does not use are rejected.
    pub fn resolve(experiment: Experiment, o: Overrides) -> Result<Self, ConfigError> {
        let mut cfg = Self::defaults(experiment);
        let label = experiment.label();
        let unused = |field: &'static str| invalid(field, format!("not used by `{label}`"));

        if let Some(v) = o.dim {
            if !experiment.is_banded() {
                return Err(unused("dim"));
            }
            cfg.dim = Some(v);
        }
        if let Some(v) = o.nu {
            if !experiment.is_pde() {
                return Err(unused("nu"));
            }
            cfg.nu = Some(v);
        }
        if let Some(v) = o.convection {
            if !experiment.is_pde() {
                return Err(unused("convection"));
            }
            cfg.convection = Some(v);
        }
        if let Some(v) = o.system {
            if experiment != Experiment::Custom {
                return Err(unused("system"));
            }
            cfg.system = Some(v);
        }
        if let Some(v) = o.n {
            if experiment == Experiment::LinearSweep {
                return Err(invalid("n", "the sweep covers n = 0..=n_max; use n_max"));
            }
            cfg.n = v;
        }
        if let Some(v) = o.k {
            cfg.k = v;
        }
        if let Some(v) = o.n_max {
            if experiment != Experiment::LinearSweep {
                return Err(unused("n_max"));
            }
            cfg.n_max = Some(v);
        }
        if let Some(v) = o.methods {
            cfg.methods = v;
        }
        for (field, given) in [("max_cycles", o.max_cycles.is_some()), ("stop_residual", o.stop_residual.is_some())] {
            if given && experiment == Experiment::LinearSweep {
                return Err(unused(field));
            }
        }
        if let Some(v) = o.max_cycles {
            cfg.max_cycles = Some(v);
        }
        if let Some(v) = o.stop_residual {
            cfg.stop_residual = Some(v);
        }
        if let Some(v) = o.on_degeneracy {
            cfg.on_degeneracy = v;
        }
        if let Some(v) = o.output {
            cfg.output = Some(v);
        }
        if let Some(v) = o.format {
            cfg.format = v;
        }
        if let Some(v) = o.grid_dump {
            if !experiment.is_pde() {
                return Err(unused("grid_dump"));
            }
            cfg.grid_dump = Some(v);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Problem dimension when it is known without reading files.
    pub fn problem_dim(&self) -> Option<usize> {
        if let Some(nu) = self.nu {
            return Some((nu - 1) * (nu - 1));
        }
        self.dim
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let e = self.experiment;
        if self.k == 0 {
            return Err(invalid("k", "k must be at least 1"));
        }
        if e.is_banded() {
            let dim = self.dim.ok_or_else(|| invalid("dim", "required"))?;
            if dim < 2 {
                return Err(invalid("dim", "N must be at least 2"));
            }
        }
        if e.is_pde() {
            let nu = self.nu.ok_or_else(|| invalid("nu", "required"))?;
            if nu < 4 {
                return Err(invalid("nu", format!("nu = {nu} is too small; need nu >= 4")));
            }
            match self.convection {
                Some(c) if c.is_finite() => {}
                _ => return Err(invalid("convection", "must be a finite number")),
            }
        }
        if e == Experiment::Custom && self.system.is_none() {
            return Err(invalid("system", "a system file is required for `custom`"));
        }
        if let Some(dim) = self.problem_dim() {
            if self.k + 1 > dim {
                return Err(invalid("k", format!("k + 1 = {} exceeds N = {dim}", self.k + 1)));
            }
        }
        if self.methods.is_empty() {
            return Err(invalid("methods", "at least one method is required"));
        }
        let mut seen = HashSet::new();
        for m in &self.methods {
            if !seen.insert(*m) {
                return Err(invalid("methods", format!("`{}` listed twice", m.label())));
            }
        }
        if e == Experiment::LinearSweep {
            if self.n_max.is_none() {
                return Err(invalid("n_max", "required"));
            }
        } else {
            match self.max_cycles {
                Some(0) => return Err(invalid("max_cycles", "at least one cycle is required")),
                None => return Err(invalid("max_cycles", "required")),
                _ => {}
            }
            match self.stop_residual {
                Some(s) if s >= 0.0 && s.is_finite() => {}
                _ => return Err(invalid("stop_residual", "must be a finite non-negative number")),
            }
        }
        Ok(())
    }

    /// Where the trace goes: the explicit path, else
    /// `$SVDMPE_OUTPUT_DIR/<experiment>.<ext>`, else the same name in the
    /// current directory. A path of `-` means standard output.
    pub fn output_path(&self) -> PathBuf {
        if let Some(p) = &self.output {
            return p.clone();
        }
        let name = format!("{}.{}", self.experiment.label(), self.format.extension());
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(name),
            _ => PathBuf::from(name),
        }
    }
}
