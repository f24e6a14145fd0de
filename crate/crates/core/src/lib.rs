//! Synchronous majority dynamics on Erdős–Rényi random graphs.
//!
//! A community of `n` vertices splits into Red and Blue camps; every day
//! each vertex simultaneously adopts the majority color among its
//! neighbors, keeping its own color on ties. This crate provides:
//!
//! - [`graph`]: seeded, bit-packed G(n,p) generation (`gen_gnp`) with a
//!   word-parallel adjacency representation;
//! - [`dynamics`]: the update kernel (`majority_step`), full-run
//!   trajectories, and exhaustive small-graph reduction checks;
//! - [`bounds`]: closed-form per-day failure bounds `P1..P4`, milestone
//!   ceilings, and the resulting lower bound on a four-day Red win;
//! - [`experiments`]: a deterministic parallel Monte Carlo harness with
//!   win tallies, milestone frequencies, and advantage-sweep estimates;
//! - [`rng`] and [`bits`]: the SplitMix64 streams and packed bit vectors
//!   everything else is built on.

pub mod bits;
pub mod bounds;
pub mod dynamics;
pub mod experiments;
pub mod graph;
pub mod rng;

pub use bounds::{BoundParams, BoundReport};
pub use dynamics::{majority_step, run, Camp, Coloring, Termination, Trajectory};
pub use experiments::{
    estimate_rho, run_trials, AggregateStats, InitialMode, TrialConfig, DEFAULT_MAX_DAYS,
};
pub use graph::{gen_gnp, Graph};
pub use rng::{Seed, SplitMix64};
