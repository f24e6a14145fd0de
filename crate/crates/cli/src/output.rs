//! Rendering of results: stable CSV bodies (LF endings, fixed field order,
//! fractions with four decimals) and JSON-lines variants for machine use.

use serde::Serialize;

use mdsim_core::bounds::BoundReport;
use mdsim_core::dynamics::Camp;
use mdsim_core::experiments::{AggregateStats, InitialMode, TrialConfig};

pub fn winner_str(w: Option<Camp>) -> &'static str {
    match w {
        Some(Camp::Red) => "red",
        Some(Camp::Blue) => "blue",
        None => "none",
    }
}

pub const SIMULATE_CSV_HEADER: &str = "trials,p,red,blue,winner,last_day,count,frequency";

fn initial_counts(cfg: &TrialConfig) -> (Option<u64>, Option<u64>) {
    match cfg.initial {
        InitialMode::FixedCounts { red } => (Some(red as u64), Some((cfg.n - red) as u64)),
        InitialMode::IidUniform => (None, None),
    }
}

fn opt_field<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn simulate_csv(cfg: &TrialConfig, stats: &AggregateStats) -> String {
    let (red, blue) = initial_counts(cfg);
    let mut out = String::from(SIMULATE_CSV_HEADER);
    out.push('\n');
    for row in stats.rows() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.4}\n",
            stats.trials,
            cfg.p,
            opt_field(red),
            opt_field(blue),
            winner_str(row.winner),
            opt_field(row.last_day),
            row.count,
            row.frequency
        ));
    }
    out
}

#[derive(Serialize)]
struct SimulateJsonRow {
    trials: u64,
    p: f64,
    red: Option<u64>,
    blue: Option<u64>,
    winner: &'static str,
    last_day: Option<u32>,
    count: u64,
    frequency: f64,
}

pub fn simulate_json_lines(cfg: &TrialConfig, stats: &AggregateStats) -> String {
    let (red, blue) = initial_counts(cfg);
    let mut out = String::new();
    for row in stats.rows() {
        let line = serde_json::to_string(&SimulateJsonRow {
            trials: stats.trials,
            p: cfg.p,
            red,
            blue,
            winner: winner_str(row.winner),
            last_day: row.last_day,
            count: row.count,
            frequency: row.frequency,
        })
        .expect("row serializes");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// One row of the advantage sweep: the Red-win estimate at advantage `k`
/// and, when the previous advantage is known, the incremental value.
#[derive(Serialize)]
pub struct RhoRow {
    pub k: u64,
    pub n: u64,
    pub p: f64,
    pub trials: u64,
    pub rho: f64,
    pub ci95: f64,
    pub v: Option<f64>,
    pub v_ci95: Option<f64>,
}

pub const RHO_CSV_HEADER: &str = "k,rho,ci95,v";

pub fn rho_csv(rows: &[RhoRow]) -> String {
    let mut out = String::from(RHO_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let v = r.v.map(|v| format!("{v:.6}")).unwrap_or_default();
        out.push_str(&format!("{},{:.6},{:.6},{}\n", r.k, r.rho, r.ci95, v));
    }
    out
}

pub fn rho_json_lines(rows: &[RhoRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("row serializes"));
        out.push('\n');
    }
    out
}

pub fn bounds_text(report: &BoundReport) -> String {
    let p = &report.params;
    let m = &report.milestones;
    let pv = &report.p_values;
    let mut out = String::new();
    out.push_str(&format!(
        "parameters: n = {}  p = {}  c = {}  eps1 = {}  eps2 = {}  r = {}\n",
        p.n, p.p, p.c, p.eps1, p.eps2, p.r
    ));
    out.push_str("conditions: (1) satisfied  (2) satisfied\n");
    out.push_str(&format!(
        "blue-camp ceilings: day0 {:.4}  day1 {:.4}  day2 {:.4}  day3 {:.4}  day4 {:.4}\n",
        m[0], m[1], m[2], m[3], m[4]
    ));
    out.push_str(&format!(
        "failure bounds: P1 = {:.10}  P2 = {:.10}  P3 = {:.3e}  P4 = {:.3e}\n",
        pv[0], pv[1], pv[2], pv[3]
    ));
    out.push_str(&format!("total failure bound: {:.10}\n", report.total_failure));
    out.push_str(&format!(
        "win probability lower bound: {:.6}\n",
        report.win_lower_bound
    ));
    out
}

pub fn bounds_json_lines(report: &BoundReport) -> String {
    let mut line = serde_json::to_string(report).expect("report serializes");
    line.push('\n');
    line
}
