//! Flag definitions. Domain checks live in the value parsers so that bad
//! values exit with the usage code and a message naming the flag.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "mdsim",
    version,
    about = "Majority dynamics on G(n,p): seeded simulation and win-probability bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run seeded trials and tabulate outcomes by (winner, last day).
    Simulate(SimulateArgs),
    /// Evaluate the four-day win bound at one parameter point.
    Bounds(BoundsArgs),
    /// Estimate Red-win probabilities over a range of initial advantages.
    Rho(RhoArgs),
    /// Run the golden-value and milestone checks; exit 0 iff all pass.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
pub enum TableFormat {
    Csv,
    JsonLines,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
pub enum ReportFormat {
    Text,
    JsonLines,
}

#[derive(Args)]
#[command(group(ArgGroup::new("initial").required(true).args(["red", "iid"])))]
pub struct SimulateArgs {
    /// Number of vertices.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Edge probability.
    #[arg(long, value_parser = parse_closed_probability)]
    pub p: f64,
    /// Initial Red camp size (the lowest-indexed vertices).
    #[arg(long)]
    pub red: Option<u64>,
    /// Each vertex picks its initial color uniformly at random.
    #[arg(long)]
    pub iid: bool,
    /// Number of independent trials.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Master seed; trial i derives its stream from (seed, i).
    #[arg(long)]
    pub seed: u64,
    /// Stop a trial after this many days without a decision.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_days: u32,
    /// Worker threads (default: MDSIM_WORKERS or available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    /// Output file; stdout when absent. A `.manifest.json` sidecar is
    /// written next to the file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BoundsArgs {
    /// Number of vertices.
    #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
    pub n: u64,
    /// Edge probability (strictly inside (0, 1)).
    #[arg(long, value_parser = parse_open_probability)]
    pub p: f64,
    /// Initial advantage: Red starts with at least n/2 + c vertices.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub c: u64,
    /// Day-2 margin.
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive)]
    pub eps1: f64,
    /// Day-1 margin.
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive)]
    pub eps2: f64,
    /// Day-3 fraction, strictly inside (0, 1/2).
    #[arg(long, default_value_t = 0.3, value_parser = parse_half_open)]
    pub r: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct RhoArgs {
    /// Number of vertices.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Edge probability.
    #[arg(long, value_parser = parse_closed_probability)]
    pub p: f64,
    /// Advantage or inclusive range of advantages, e.g. `4` or `0:6`.
    #[arg(long, value_parser = parse_k_range)]
    pub k: (u64, u64),
    /// Trials per advantage value.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Master seed, shared across the advantage sweep (paired estimates).
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_days: u32,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Number of vertices.
    #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
    pub n: u64,
    /// Edge probability (strictly inside (0, 1)).
    #[arg(long, default_value_t = 0.5, value_parser = parse_open_probability)]
    pub p: f64,
    /// Initial advantage.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub c: u64,
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive)]
    pub eps2: f64,
    #[arg(long, default_value_t = 0.3, value_parser = parse_half_open)]
    pub r: f64,
    /// Number of milestone-check trials.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Master seed for the milestone-check trials.
    #[arg(long)]
    pub seed: u64,
    /// Initial Red camp size (default: ceil(n/2) + c).
    #[arg(long)]
    pub red: Option<u64>,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(4..))]
    pub max_days: u32,
    #[arg(long)]
    pub workers: Option<usize>,
}

fn parse_closed_probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("probability must lie in [0, 1], got {v}"))
    }
}

fn parse_open_probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("probability must lie strictly inside (0, 1), got {v}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("value must be positive, got {v}"))
    }
}

fn parse_half_open(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 0.5 {
        Ok(v)
    } else {
        Err(format!("value must lie strictly inside (0, 1/2), got {v}"))
    }
}

fn parse_k_range(s: &str) -> Result<(u64, u64), String> {
    let parse_one = |t: &str| -> Result<u64, String> {
        t.parse().map_err(|_| format!("`{t}` is not an integer"))
    };
    match s.split_once(':') {
        None => {
            let k = parse_one(s)?;
            Ok((k, k))
        }
        Some((a, b)) => {
            let lo = parse_one(a)?;
            let hi = parse_one(b)?;
            if lo > hi {
                return Err(format!("empty range: {lo} > {hi}"));
            }
            Ok((lo, hi))
        }
    }
}
