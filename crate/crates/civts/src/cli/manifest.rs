//! The per-run manifest: resolved configuration, seeds, outputs, timing.
//!
//! Written on every successful run as `run_manifest.json` into the run's
//! output directory when one exists, otherwise into `CIVTS_OUTPUT_DIR`, and
//! as a last resort the working directory.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub duration_ms: u128,
}

pub struct ManifestWriter {
    manifest: RunManifest,
    out_dir: Option<PathBuf>,
}

impl ManifestWriter {
    pub fn new(subcommand: &str, out_dir: Option<&Path>) -> Self {
        Self {
            manifest: RunManifest {
                subcommand: subcommand.to_string(),
                config: serde_json::Value::Null,
                seeds: Vec::new(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                outputs: Vec::new(),
                duration_ms: 0,
            },
            out_dir: out_dir.map(|p| p.to_path_buf()),
        }
    }

    pub fn config(mut self, config: serde_json::Value) -> Self {
        self.manifest.config = config;
        self
    }

    pub fn seeds(mut self, seeds: Vec<u64>) -> Self {
        self.manifest.seeds = seeds;
        self
    }

    pub fn outputs(mut self, outputs: Vec<String>) -> Self {
        self.manifest.outputs = outputs;
        self
    }

    fn target_dir(&self) -> PathBuf {
        if let Some(dir) = &self.out_dir {
            // A file path means "next to that file".
            if dir.extension().is_some() {
                return dir.parent().map(|p| p.to_path_buf()).unwrap_or_else(|| ".".into());
            }
            return dir.clone();
        }
        if let Ok(env_dir) = std::env::var("CIVTS_OUTPUT_DIR") {
            if !env_dir.is_empty() {
                return PathBuf::from(env_dir);
            }
        }
        PathBuf::from(".")
    }

    pub fn write(mut self, elapsed: Duration) -> std::io::Result<()> {
        self.manifest.duration_ms = elapsed.as_millis();
        let dir = self.target_dir();
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("run_manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.manifest)?)?;
        Ok(())
    }
}
