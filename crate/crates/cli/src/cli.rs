//! Argument parsing and the top-level command flow.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_config_file, ConfigError, Experiment, ExperimentConfig, Format, MethodTag, Overrides, PolicyTag};
use crate::output::{dump_grids, write_to_path};
use crate::run::execute;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "svdmpe", version, about = "Convergence traces for SVD-MPE and MPE extrapolation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sliding window s_{n,k}, n = 0..=n_max, over one iterate stream of the
    /// banded test problem.
    LinearSweep {
        #[command(flatten)]
        dim: DimArgs,
        /// Last window start.
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cycling on the banded test problem.
    LinearCycle {
        #[command(flatten)]
        dim: DimArgs,
        #[command(flatten)]
        cycle: CycleArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cycling on the convection-diffusion problem.
    Pde {
        /// Splitting(s) to run.
        #[arg(long, value_enum, default_value_t = SweepChoice::Both)]
        sweep: SweepChoice,
        #[command(flatten)]
        pde: PdeArgs,
        #[command(flatten)]
        cycle: CycleArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Same as `pde --sweep jacobi`.
    PdeJacobi {
        #[command(flatten)]
        pde: PdeArgs,
        #[command(flatten)]
        cycle: CycleArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Same as `pde --sweep gauss-seidel`.
    PdeGaussSeidel {
        #[command(flatten)]
        pde: PdeArgs,
        #[command(flatten)]
        cycle: CycleArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cycling on a linear system x = T x + d read from a JSON file with
    /// keys `t`, `d` and optionally `solution` and `x0`.
    Custom {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        cycle: CycleArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output path from the file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepChoice {
    Jacobi,
    GaussSeidel,
    Both,
}

#[derive(Debug, Args)]
pub struct DimArgs {
    /// Dimension of the banded problem.
    #[arg(long = "N", visible_alias = "dim")]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PdeArgs {
    /// Grid parameter; mesh size h = 1/nu and N = (nu - 1)^2 unknowns.
    #[arg(long)]
    pub nu: Option<usize>,
    /// Convection coefficient C.
    #[arg(long)]
    pub convection: Option<f64>,
    /// Writes each arm's final grid to <PREFIX>-<sweep>-<method>.csv.
    #[arg(long, value_name = "PREFIX")]
    pub grid_dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CycleArgs {
    /// Iterates skipped before the window in each cycle.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub max_cycles: Option<usize>,
    /// Stop once |f(s) - s| is at most this value.
    #[arg(long)]
    pub stop_residual: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Window size; k + 1 iterate differences per extrapolation.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated list of svd-mpe, mpe, plain.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub methods: Option<Vec<MethodTag>>,
    #[arg(long, value_enum)]
    pub on_degeneracy: Option<PolicyTag>,
    /// Output file, `-` for standard output. Defaults to
    /// `$SVDMPE_OUTPUT_DIR/<experiment>.<ext>`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl CommonArgs {
    fn apply(self, o: &mut Overrides) {
        o.k = self.k;
        o.methods = self.methods;
        o.on_degeneracy = self.on_degeneracy;
        o.output = self.output;
        o.format = self.format;
    }
}

impl CycleArgs {
    fn apply(self, o: &mut Overrides) {
        o.n = self.n;
        o.max_cycles = self.max_cycles;
        o.stop_residual = self.stop_residual;
    }
}

impl PdeArgs {
    fn apply(self, o: &mut Overrides) {
        o.nu = self.nu;
        o.convection = self.convection;
        o.grid_dump = self.grid_dump;
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(String),
}

/// Turns parsed arguments into a resolved configuration.
pub fn resolve(command: Command) -> Result<ExperimentConfig, CliError> {
    let mut o = Overrides::default();
    let experiment = match command {
        Command::LinearSweep { dim, n_max, common } => {
            o.dim = dim.dim;
            o.n_max = n_max;
            common.apply(&mut o);
            Experiment::LinearSweep
        }
        Command::LinearCycle { dim, cycle, common } => {
            o.dim = dim.dim;
            cycle.apply(&mut o);
            common.apply(&mut o);
            Experiment::LinearCycle
        }
        Command::Pde { sweep, pde, cycle, common } => {
            pde.apply(&mut o);
            cycle.apply(&mut o);
            common.apply(&mut o);
            match sweep {
                SweepChoice::Jacobi => Experiment::PdeJacobi,
                SweepChoice::GaussSeidel => Experiment::PdeGaussSeidel,
                SweepChoice::Both => Experiment::Pde,
            }
        }
        Command::PdeJacobi { pde, cycle, common } => {
            pde.apply(&mut o);
            cycle.apply(&mut o);
            common.apply(&mut o);
            Experiment::PdeJacobi
        }
        Command::PdeGaussSeidel { pde, cycle, common } => {
            pde.apply(&mut o);
            cycle.apply(&mut o);
            common.apply(&mut o);
            Experiment::PdeGaussSeidel
        }
        Command::Custom { system, cycle, common } => {
            o.system = Some(system);
            cycle.apply(&mut o);
            common.apply(&mut o);
            Experiment::Custom
        }
        Command::Run { config, output } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", config.display())))?;
            let (experiment, mut file) = parse_config_file(&text).map_err(|e| ConfigError {
                field: "config",
                reason: format!("{}: {e}", config.display()),
            })?;
            if output.is_some() {
                file.output = output;
            }
            o = file;
            experiment
        }
    };
    Ok(ExperimentConfig::resolve(experiment, o)?)
}

/// Runs the tool and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    run_config(&cfg)
}

/// Executes a resolved configuration and writes its outputs.
pub fn run_config(cfg: &ExperimentConfig) -> i32 {
    let report = match execute(cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let path = cfg.output_path();
    if let Err(e) = write_to_path(&report, cfg, &path) {
        eprintln!("error: cannot write {}: {e}", path.display());
        return EXIT_CONFIG;
    }
    if let Some(prefix) = &cfg.grid_dump {
        if let Err(e) = dump_grids(&report, prefix) {
            eprintln!("error: cannot write grid dump: {e}");
            return EXIT_CONFIG;
        }
    }
    for g in &report.gaps {
        eprintln!("warning: window skipped: {g}");
    }
    if report.failures.is_empty() {
        EXIT_OK
    } else {
        for f in &report.failures {
            eprintln!("error: numerical failure: {f}");
        }
        EXIT_NUMERICAL
    }
}
