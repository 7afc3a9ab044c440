use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Record of one run, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_hash: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub samples: Option<usize>,
    pub workers: usize,
    pub wall_time_s: f64,
    pub finished_unix_s: u64,
    pub status: &'static str,
    pub summary: Value,
}

impl RunManifest {
    pub fn new(subcommand: &str, config_hash: String, config: Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            config_hash,
            config,
            seed: None,
            outputs: Vec::new(),
            samples: None,
            workers: rayon::current_num_threads(),
            wall_time_s: 0.0,
            finished_unix_s: 0,
            status: "ok",
            summary: Value::Null,
        }
    }

    pub fn write(mut self, dir: &Path, wall_time_s: f64) -> Result<()> {
        self.wall_time_s = wall_time_s;
        self.finished_unix_s = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
