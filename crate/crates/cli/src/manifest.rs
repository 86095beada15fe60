//! Run manifests: every command serializes its resolved inputs next to
//! its outputs, first with `status: "failed"` before any data file is
//! written, then flipped to `"ok"` with the wall-clock duration.
//! Re-running the recorded inputs reproduces the data files
//! byte-identically (deterministic solvers, no RNG).

use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub status: String,
    pub version: String,
    pub n_elem: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<String>>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str, n_elem: usize, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            status: "failed".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            n_elem,
            dt: None,
            horizon: None,
            modes: None,
            profile: None,
            grid: None,
            config,
            outputs: Vec::new(),
            duration_seconds: None,
        }
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let file = std::fs::File::create(dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }
}
