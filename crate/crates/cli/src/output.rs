//! CSV and JSON trace writers.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, Format};
use crate::run::{Report, Rows};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(report: &Report, w: W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    match &report.rows {
        Rows::Sweep(rows) => {
            out.write_record(["n", "method", "error_l2", "residual_estimate", "sigma_min", "alpha"])?;
            for r in rows {
                out.write_record([
                    r.n.to_string(),
                    r.method.label().to_string(),
                    num(r.error_l2),
                    num(r.residual_estimate),
                    num(r.sigma_min),
                    num(r.alpha),
                ])?;
            }
        }
        Rows::Cycle(rows) => {
            let with_sweep = rows.first().is_some_and(|r| r.sweep.is_some());
            let mut header = vec![
                "cycle",
                "method",
                "error_l2",
                "true_residual_l2",
                "residual_estimate",
                "sigma_min",
                "alpha",
                "cumulative_f_evals",
            ];
            if with_sweep {
                header.push("sweep");
            }
            out.write_record(&header)?;
            for r in rows {
                let mut rec = vec![
                    r.cycle.to_string(),
                    r.method.label().to_string(),
                    num(r.error_l2),
                    num(Some(r.true_residual_l2)),
                    num(r.residual_estimate),
                    num(r.sigma_min),
                    num(r.alpha),
                    r.cumulative_f_evals.to_string(),
                ];
                if with_sweep {
                    rec.push(r.sweep.unwrap_or_default().to_string());
                }
                out.write_record(&rec)?;
            }
        }
    }
    out.flush()
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    name: &'static str,
    version: &'static str,
    /// The starting vector of every run.
    initial_guess: &'static str,
    config: &'a ExperimentConfig,
    failures: &'a [String],
    gaps: &'a [String],
    rows: &'a Rows,
}

pub fn write_json<W: Write>(report: &Report, cfg: &ExperimentConfig, mut w: W) -> io::Result<()> {
    let doc = JsonDocument {
        name: TOOL_NAME,
        version: TOOL_VERSION,
        initial_guess: "zero",
        config: cfg,
        failures: &report.failures,
        gaps: &report.gaps,
        rows: &report.rows,
    };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)
}

pub fn write_report<W: Write>(report: &Report, cfg: &ExperimentConfig, w: W) -> io::Result<()> {
    match cfg.format {
        Format::Csv => write_csv(report, w),
        Format::Json => write_json(report, cfg, w),
    }
}

/// Writes the trace to `path` (`-` for standard output).
pub fn write_to_path(report: &Report, cfg: &ExperimentConfig, path: &Path) -> io::Result<()> {
    if path == Path::new("-") {
        let stdout = io::stdout();
        return write_report(report, cfg, stdout.lock());
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = io::BufWriter::new(std::fs::File::create(path)?);
    write_report(report, cfg, file)
}

/// Writes `<prefix>-<sweep>-<method>.csv` for every PDE arm and returns the
/// paths.
pub fn dump_grids(report: &Report, prefix: &Path) -> io::Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for s in &report.solutions {
        let mut name = prefix.as_os_str().to_owned();
        name.push(format!("-{}-{}.csv", s.sweep.label(), s.method.label()));
        let path = PathBuf::from(name);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        s.grid.write_csv(io::BufWriter::new(std::fs::File::create(&path)?))?;
        paths.push(path);
    }
    Ok(paths)
}
