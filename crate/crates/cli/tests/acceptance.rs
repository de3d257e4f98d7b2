//! Acceptance run: one PASS/FAIL line per criterion, with its runtime
//! budget. Exits non-zero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use svd_mpe::linalg::norm2;
use svd_mpe::problems::{ConvectionDiffusionProblem, Sweep};
use svd_mpe::{DenseVector, FixedPointProblem};
use svd_mpe_cli::output::write_report;
use svd_mpe_cli::{execute, CycleRow, Experiment, ExperimentConfig, MethodTag, Overrides, Rows, SweepRow};
use svd_mpe_oracle::suite;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= budget;
    let pass = out.pass && in_time;
    println!(
        "{} criterion {id}: {title}: {} [{:.3} s of {:.0} s]{}",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        budget.as_secs_f64(),
        if in_time { "" } else { " (over budget)" },
    );
    pass
}

fn sweep_config() -> ExperimentConfig {
    ExperimentConfig::defaults(Experiment::LinearSweep)
}

fn cycle_config() -> ExperimentConfig {
    let o = Overrides {
        methods: Some(vec![MethodTag::SvdMpe]),
        max_cycles: Some(20),
        stop_residual: Some(1e-10),
        ..Overrides::default()
    };
    ExperimentConfig::resolve(Experiment::LinearCycle, o).expect("valid config")
}

fn pde_config() -> ExperimentConfig {
    let o = Overrides {
        nu: Some(32),
        k: Some(20),
        methods: Some(vec![MethodTag::SvdMpe]),
        max_cycles: Some(50),
        ..Overrides::default()
    };
    ExperimentConfig::resolve(Experiment::Pde, o).expect("valid config")
}

fn write_trace(cfg: &ExperimentConfig, path: &Path) -> Rows {
    let report = execute(cfg).expect("experiment runs");
    let file = std::fs::File::create(path).expect("trace file");
    write_report(&report, cfg, std::io::BufWriter::new(file)).expect("trace written");
    report.rows
}

fn sweep_rows(rows: Rows) -> Vec<SweepRow> {
    match rows {
        Rows::Sweep(r) => r,
        Rows::Cycle(_) => panic!("expected sweep rows"),
    }
}

fn cycle_rows(rows: Rows) -> Vec<CycleRow> {
    match rows {
        Rows::Cycle(r) => r,
        Rows::Sweep(_) => panic!("expected cycle rows"),
    }
}

/// Least-squares slope of `log10(error)` against `n`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y.log10()));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = points.iter().map(|(x, y)| (x - mx) * (y.log10() - my)).sum();
    let den: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    num / den
}

fn criterion6(dir: &Path) -> Outcome {
    let rows = sweep_rows(write_trace(&sweep_config(), &dir.join("linear-sweep.csv")));
    let curve = |m: MethodTag| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.method == m)
            .filter_map(|r| r.error_l2.map(|e| (r.n as f64, e)))
            .collect()
    };
    let svd = curve(MethodTag::SvdMpe);
    let mpe = curve(MethodTag::Mpe);
    if svd.len() != 31 || mpe.len() != 31 {
        return check(false, format!("expected 31 points per method, got {} and {}", svd.len(), mpe.len()));
    }
    let decreasing = |c: &[(f64, f64)]| c[30].1 < c[0].1 && log_slope(c) < 0.0;
    let worst_ratio = svd
        .iter()
        .zip(&mpe)
        .map(|(a, b)| (a.1 / b.1).max(b.1 / a.1))
        .fold(0.0, f64::max);
    check(
        decreasing(&svd) && decreasing(&mpe) && worst_ratio <= 10.0,
        format!(
            "error n=0 -> 30: svd-mpe {:.2e} -> {:.2e}, mpe {:.2e} -> {:.2e}; worst ratio {worst_ratio:.3}",
            svd[0].1, svd[30].1, mpe[0].1, mpe[30].1
        ),
    )
}

fn criterion7(dir: &Path) -> Outcome {
    let rows = cycle_rows(write_trace(&cycle_config(), &dir.join("linear-cycle.csv")));
    let residuals: Vec<f64> = rows.iter().map(|r| r.true_residual_l2).collect();
    let hit = residuals.iter().position(|r| *r <= 1e-10);
    let strictly = residuals.windows(2).all(|w| w[1] < w[0]);
    check(
        hit.is_some_and(|i| i < 20) && strictly,
        format!(
            "residual <= 1e-10 at cycle {}; strictly decreasing: {strictly}; residuals {:?}",
            hit.map_or("none".to_string(), |i| (i + 1).to_string()),
            residuals.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>()
        ),
    )
}

/// Plain sweeps from zero until the error reaches `target`.
fn plain_sweeps_to(p: &ConvectionDiffusionProblem, target: f64, cap: usize) -> Option<usize> {
    let s = p.known_solution().expect("manufactured solution").to_vec();
    let mut x = DenseVector::zeros(p.dim()).into_vec();
    for m in 1..=cap {
        x = p.apply(&x);
        let d: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a - b).collect();
        if norm2(&d) <= target {
            return Some(m);
        }
    }
    None
}

fn criterion8(dir: &Path) -> Outcome {
    let cfg = pde_config();
    let rows = cycle_rows(write_trace(&cfg, &dir.join("pde.csv")));
    let mut pass = true;
    let mut parts = Vec::new();
    for sweep in [Sweep::Jacobi, Sweep::GaussSeidel] {
        let first = rows
            .iter()
            .filter(|r| r.sweep == Some(sweep.label()))
            .find(|r| r.error_l2.is_some_and(|e| e <= 1e-8));
        let p = ConvectionDiffusionProblem::new(32, 20.0, sweep).expect("problem");
        let plain = plain_sweeps_to(&p, 1e-8, 100_000);
        match (first, plain) {
            (Some(r), Some(m)) => {
                let ok = r.cycle <= 50 && r.cumulative_f_evals < m;
                pass &= ok;
                parts.push(format!(
                    "{}: error {:.2e} at cycle {} ({} evals) vs {m} plain sweeps",
                    sweep.label(),
                    r.error_l2.unwrap_or(f64::NAN),
                    r.cycle,
                    r.cumulative_f_evals
                ));
            }
            _ => {
                pass = false;
                parts.push(format!("{}: target not reached (plain: {plain:?})", sweep.label()));
            }
        }
    }
    check(pass, parts.join("; "))
}

fn criterion9(first: &Path, second: &Path) -> Outcome {
    let mut same = true;
    let mut names = Vec::new();
    for name in ["linear-sweep.csv", "linear-cycle.csv", "pde.csv"] {
        let a = std::fs::read(first.join(name)).expect("first trace");
        let b = std::fs::read(second.join(name)).expect("second trace");
        same &= !a.is_empty() && a == b;
        names.push(format!("{name} ({} bytes)", a.len()));
    }
    // JSON output also carries the config echo.
    let mut json_cfg = cycle_config();
    json_cfg.format = svd_mpe_cli::Format::Json;
    let a = first.join("linear-cycle.json");
    let b = second.join("linear-cycle.json");
    write_trace(&json_cfg, &a);
    write_trace(&json_cfg, &b);
    let json_same = std::fs::read(&a).expect("json") == std::fs::read(&b).expect("json");
    same &= json_same;
    names.push("linear-cycle.json".into());
    check(same, format!("byte-identical on rerun: {}", names.join(", ")))
}

fn main() {
    let dirs = [tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir")];
    let secs = Duration::from_secs;
    let mut all = true;

    all &= run(1, "finite termination", secs(1), || {
        let s = suite::finite_termination(2024, 50);
        check(
            s.instances == 50 && s.worst <= 1e-10,
            format!("{} instances, worst relative error {:.2e} (tol 1e-10)", s.instances, s.worst),
        )
    });
    all &= run(2, "residual estimate identity", secs(1), || {
        let s = suite::residual_identity(2025, 50);
        check(
            s.relative.worst <= 1e-10 && s.zero_level_mismatches == 0,
            format!(
                "{} solves, worst relative mismatch {:.2e} (tol 1e-10); {} terminated solves with both sides at zero level, {} mismatched",
                s.relative.instances, s.relative.worst, s.zero_level, s.zero_level_mismatches
            ),
        )
    });
    all &= run(3, "determinant representations", secs(5), || {
        let s = suite::determinant_equivalence(2026, 25);
        check(
            s.shifted_gram.instances == 25 && s.shifted_gram.worst <= 1e-8 && s.left_vectors.worst <= 1e-8,
            format!(
                "{} instances ({} skipped): shifted-Gram route {:.2e}, left-vector route {:.2e} (tol 1e-8)",
                s.shifted_gram.instances, s.shifted_gram.skipped, s.shifted_gram.worst, s.left_vectors.worst
            ),
        )
    });
    all &= run(4, "Krylov characterization", secs(2), || {
        let s = suite::krylov_characterization(2027, 25);
        check(
            s.right.instances == 25 && s.right.worst <= 1e-10 && s.left.worst <= 1e-10,
            format!(
                "{} instances: subspace remainder {:.2e}, left orthogonality {:.2e} x |r0| (tol 1e-10)",
                s.right.instances, s.right.worst, s.left.worst
            ),
        )
    });
    all &= run(5, "QR and small SVD kernels", secs(5), || {
        let s = suite::kernel_suite(2028, 40);
        let pass = s.qr_orthogonality.worst <= 1e-10
            && s.qr_reconstruction.worst <= 1e-12
            && s.svd_vs_oracle.worst <= 1e-10
            && s.svd_orthogonality.worst <= 1e-12
            && s.svd_reconstruction.worst <= 1e-12
            && s.svd_ordering_violations == 0;
        check(
            pass,
            format!(
                "QR orth {:.1e}, recon {:.1e}; SVD vs oracle {:.1e}, orth {:.1e}, recon {:.1e}, ordering violations {}",
                s.qr_orthogonality.worst,
                s.qr_reconstruction.worst,
                s.svd_vs_oracle.worst,
                s.svd_orthogonality.worst,
                s.svd_reconstruction.worst,
                s.svd_ordering_violations
            ),
        )
    });

    let first = dirs[0].path();
    all &= run(6, "banded sweep N=100, k=5", secs(5), || criterion6(first));
    all &= run(7, "banded cycling N=1000, k=20", secs(10), || criterion7(first));
    all &= run(8, "convection-diffusion cycling nu=32, k=20", secs(60), || criterion8(first));

    let second = dirs[1].path();
    all &= run(9, "determinism", secs(80), || {
        write_trace(&sweep_config(), &second.join("linear-sweep.csv"));
        write_trace(&cycle_config(), &second.join("linear-cycle.csv"));
        write_trace(&pde_config(), &second.join("pde.csv"));
        criterion9(first, second)
    });

    if !all {
        println!("acceptance: FAILED");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
