//! `mdsim`: seeded majority-dynamics simulation on G(n,p), win-probability
//! bounds, advantage sweeps, and a self-check command.
//!
//! Exit codes: 0 success, 1 verification failure (or internal error),
//! 2 usage error, 3 theorem-precondition failure.

mod args;
mod manifest;
mod output;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use mdsim_core::bounds::{self, BoundParams, BoundsError};
use mdsim_core::experiments::{
    estimate_rho, milestone_check_from_stats, run_trials, ExperimentError, InitialMode, TrialConfig,
};

use args::{BoundsArgs, Cli, Command, ReportFormat, RhoArgs, SimulateArgs, TableFormat, VerifyArgs};
use manifest::RunManifest;
use output::RhoRow;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: EXIT_USAGE,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        let code = match &e {
            ExperimentError::Bounds(BoundsError::PreconditionViolated(_)) => EXIT_PRECONDITION,
            _ => EXIT_USAGE,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        let code = match &e {
            BoundsError::PreconditionViolated(_) => EXIT_PRECONDITION,
            BoundsError::InvalidParameter(_) => EXIT_USAGE,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            message: e.to_string(),
            code: 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Rho(a) => cmd_rho(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Worker-count resolution: flag, then MDSIM_WORKERS, then all cores.
fn resolve_workers(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(w) = flag {
        if w == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        return Ok(w);
    }
    if let Ok(raw) = std::env::var("MDSIM_WORKERS") {
        let w: usize = raw
            .parse()
            .map_err(|_| CliError::usage(format!("MDSIM_WORKERS=`{raw}` is not a number")))?;
        if w == 0 {
            return Err(CliError::usage("MDSIM_WORKERS must be at least 1"));
        }
        return Ok(w);
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError {
            message: format!("failed to build worker pool: {e}"),
            code: 1,
        })?;
    Ok(pool.install(f))
}

fn emit(body: &str, out: Option<&Path>, manifest: Option<RunManifest>) -> Result<(), CliError> {
    match out {
        None => {
            print!("{body}");
        }
        Some(path) => {
            std::fs::write(path, body)?;
            if let Some(m) = manifest {
                m.write_sidecar(path)?;
            }
        }
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<u8, CliError> {
    let workers = resolve_workers(a.workers)?;
    let started = Instant::now();
    let initial = match a.red {
        Some(red) => {
            if red > a.n {
                return Err(CliError::usage(format!(
                    "--red {red} exceeds --n {}",
                    a.n
                )));
            }
            InitialMode::FixedCounts { red: red as usize }
        }
        None => InitialMode::IidUniform,
    };
    let cfg = TrialConfig {
        n: a.n as usize,
        p: a.p,
        initial,
        trials: a.trials,
        master_seed: a.seed,
        max_days: a.max_days,
    };
    let stats = in_pool(workers, || run_trials(&cfg, None))??;
    let body = match a.format {
        TableFormat::Csv => output::simulate_csv(&cfg, &stats),
        TableFormat::JsonLines => output::simulate_json_lines(&cfg, &stats),
    };
    let manifest = a.out.as_deref().map(|path| {
        RunManifest::new(
            "simulate",
            json!({
                "n": a.n, "p": a.p,
                "red": a.red, "iid": a.red.is_none(),
                "trials": a.trials, "seed": a.seed,
                "max_days": a.max_days,
                "format": format_name(a.format),
            }),
            a.seed,
            workers,
            started.elapsed().as_secs_f64(),
            path,
        )
    });
    emit(&body, a.out.as_deref(), manifest)?;
    Ok(0)
}

fn cmd_bounds(a: BoundsArgs) -> Result<u8, CliError> {
    let started = Instant::now();
    let params = BoundParams::new(a.n, a.p, a.c, a.eps1, a.eps2, a.r)?;
    let report = bounds::theorem_report(&params)?;
    let body = match a.format {
        ReportFormat::Text => output::bounds_text(&report),
        ReportFormat::JsonLines => output::bounds_json_lines(&report),
    };
    let manifest = a.out.as_deref().map(|path| {
        RunManifest::new(
            "bounds",
            json!({
                "n": a.n, "p": a.p, "c": a.c,
                "eps1": a.eps1, "eps2": a.eps2, "r": a.r,
            }),
            0,
            1,
            started.elapsed().as_secs_f64(),
            path,
        )
    });
    emit(&body, a.out.as_deref(), manifest)?;
    Ok(0)
}

fn cmd_rho(a: RhoArgs) -> Result<u8, CliError> {
    let workers = resolve_workers(a.workers)?;
    let started = Instant::now();
    let (lo, hi) = a.k;
    let rows = in_pool(workers, || -> Result<Vec<RhoRow>, ExperimentError> {
        let mut rows = Vec::new();
        // rho(0) = 1/2 by symmetry; it anchors v(1) even when the sweep
        // starts at k = 1.
        let mut prev: Option<(f64, f64)> = (lo == 1).then_some((0.5, 0.0));
        for k in lo..=hi {
            let est = estimate_rho(k, a.n as usize, a.p, a.trials, a.seed, a.max_days)?;
            let (v, v_ci95) = match prev {
                Some((pf, pc)) => (
                    Some(est.red_win_freq - pf),
                    Some((est.ci95_halfwidth * est.ci95_halfwidth + pc * pc).sqrt()),
                ),
                None => (None, None),
            };
            rows.push(RhoRow {
                k,
                n: a.n,
                p: a.p,
                trials: a.trials,
                rho: est.red_win_freq,
                ci95: est.ci95_halfwidth,
                v,
                v_ci95,
            });
            prev = Some((est.red_win_freq, est.ci95_halfwidth));
        }
        Ok(rows)
    })??;
    let body = match a.format {
        TableFormat::Csv => output::rho_csv(&rows),
        TableFormat::JsonLines => output::rho_json_lines(&rows),
    };
    let manifest = a.out.as_deref().map(|path| {
        RunManifest::new(
            "rho",
            json!({
                "n": a.n, "p": a.p, "k": format!("{lo}:{hi}"),
                "trials": a.trials, "seed": a.seed, "max_days": a.max_days,
                "format": format_name(a.format),
            }),
            a.seed,
            workers,
            started.elapsed().as_secs_f64(),
            path,
        )
    });
    emit(&body, a.out.as_deref(), manifest)?;
    Ok(0)
}

/// Reference parameter point for the golden-value suite.
const GOLDEN: (u64, f64, u64, f64, f64, f64) = (550, 0.5, 6, 0.01, 0.01, 0.3);
/// Tolerance for reproducing printed reference values (they are rounded to
/// five decimals; P2 in particular evaluates 7.6e-8 above its printed value).
const REPRO_TOL: f64 = 1e-4;

fn cmd_verify(a: VerifyArgs) -> Result<u8, CliError> {
    let workers = resolve_workers(a.workers)?;
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{} {} ({detail})", if ok { "PASS" } else { "FAIL" }, name);
        all_ok &= ok;
    };

    // Golden bound values at the reference point.
    let (gn, gp, gc, ge1, ge2, gr) = GOLDEN;
    let golden = bounds::theorem_report(&BoundParams::new(gn, gp, gc, ge1, ge2, gr)?)?;
    let [p1, p2, p3, p4] = golden.p_values;
    check("golden P1 <= 0.06866", p1 <= 0.06866, format!("P1 = {p1:.6}"));
    check(
        "golden P2 <= 0.00144 (repro tol 1e-4)",
        p2 <= 0.00144 + REPRO_TOL && (p2 - 0.00144).abs() <= 1e-5,
        format!("P2 = {p2:.8}"),
    );
    check("golden P3 <= 0.00010", p3 <= 0.00010, format!("P3 = {p3:.3e}"));
    check("golden P4 <= 0.00005", p4 <= 0.00005, format!("P4 = {p4:.3e}"));
    check(
        "golden win bound >= 0.93",
        golden.win_lower_bound >= 0.93,
        format!("bound = {:.6}", golden.win_lower_bound),
    );
    let c4 = bounds::theorem_report(&BoundParams::new(gn, gp, 4, ge1, ge2, gr)?)?;
    check(
        "golden win bound (c = 4) >= 0.73",
        c4.win_lower_bound >= 0.73,
        format!("bound = {:.6}", c4.win_lower_bound),
    );

    // Milestone frequencies at the requested point.
    let params = BoundParams::new(a.n, a.p, a.c, a.eps1, a.eps2, a.r)?;
    let report = bounds::theorem_report(&params)?;
    let red = a.red.unwrap_or(a.n.div_ceil(2) + a.c);
    if red > a.n {
        return Err(CliError::usage(format!("--red {red} exceeds --n {}", a.n)));
    }
    let cfg = TrialConfig {
        n: a.n as usize,
        p: a.p,
        initial: InitialMode::FixedCounts { red: red as usize },
        trials: a.trials,
        master_seed: a.seed,
        max_days: a.max_days,
    };
    let stats = in_pool(workers, || run_trials(&cfg, Some(&params)))??;
    let milestones = milestone_check_from_stats(&cfg, &stats, &report)?;
    for day in &milestones.days {
        let name = format!("milestone day {} conditional frequency", day.day);
        match (day.frequency, day.ok) {
            (Some(f), Some(ok)) => check(
                &name,
                ok,
                format!(
                    "{}/{} = {f:.4}, need >= {:.4}",
                    day.passed, day.qualified, day.threshold
                ),
            ),
            _ => check(&name, true, "not applicable: no qualifying trials".into()),
        }
    }

    Ok(if all_ok { 0 } else { EXIT_CHECK_FAILED })
}

fn format_name(f: TableFormat) -> &'static str {
    match f {
        TableFormat::Csv => "csv",
        TableFormat::JsonLines => "json-lines",
    }
}
