//! Run manifests: every command writes one next to its outputs so a run can
//! be reproduced exactly (the pipeline is deterministic; no seeds involved).

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// Full argv of the invocation.
    pub command: Vec<String>,
    pub preset: Option<String>,
    /// Flattened parameter record of the subcommand.
    pub parameters: serde_json::Value,
    /// Paths of every file the run produced.
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(preset: Option<String>, parameters: serde_json::Value) -> Self {
        RunManifest {
            command: std::env::args().collect(),
            preset,
            parameters,
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: time::OffsetDateTime::now_utc()
                .format(&time::format_description::well_known::Rfc3339)
                .unwrap_or_else(|_| "unknown".into()),
        }
    }

    pub fn record(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Write the manifest as `<stem>_manifest.json` in `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> anyhow::Result<PathBuf> {
        let path = dir.join(format!("{stem}_manifest.json"));
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}
