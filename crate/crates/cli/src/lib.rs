//! Experiment runner behind the `svdmpe` binary: configuration, execution
//! of the method arms, and CSV/JSON trace output.

pub mod cli;
pub mod config;
pub mod output;
pub mod run;
pub mod system;

pub use config::{ConfigError, Experiment, ExperimentConfig, Format, MethodTag, Overrides, PolicyTag};
pub use run::{execute, CycleRow, Report, Rows, SweepRow};
