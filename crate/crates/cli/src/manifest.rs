//! Reproducibility manifests: every output file gets a `.manifest.json`
//! sidecar carrying everything needed to regenerate it byte-identically
//! (the CSV/JSON body depends only on the parameters and seed, never on
//! worker count or wall-clock time).

use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use mdsim_core::rng::{RNG_ALGORITHM, SPLITMIX64_GAMMA};

#[derive(Serialize)]
pub struct PrngMetadata {
    pub algorithm: &'static str,
    pub increment: String,
    pub master_seed: u64,
}

impl PrngMetadata {
    pub fn new(master_seed: u64) -> Self {
        PrngMetadata {
            algorithm: RNG_ALGORITHM,
            increment: format!("{SPLITMIX64_GAMMA:#018x}"),
            master_seed,
        }
    }
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub parameters: serde_json::Value,
    pub prng: PrngMetadata,
    pub workers: usize,
    pub duration_seconds: f64,
    pub output: String,
}

impl RunManifest {
    pub fn new(
        subcommand: &'static str,
        parameters: serde_json::Value,
        master_seed: u64,
        workers: usize,
        duration_seconds: f64,
        output: &Path,
    ) -> Self {
        RunManifest {
            tool: "mdsim",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            parameters,
            prng: PrngMetadata::new(master_seed),
            workers,
            duration_seconds,
            output: output.display().to_string(),
        }
    }

    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write_sidecar(&self, output: &Path) -> io::Result<PathBuf> {
        let path = Self::sidecar_path(output);
        let mut body = serde_json::to_string_pretty(self).expect("manifest serializes");
        body.push('\n');
        std::fs::write(&path, body)?;
        Ok(path)
    }
}
