//! Run manifests: what was run, with which settings, and what it wrote.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            argv,
            config: serde_json::Value::Null,
            seeds: Vec::new(),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: 0,
        }
    }

    /// Where the manifest goes when no explicit path is given: next to the
    /// first output file, otherwise the working directory.
    pub fn default_path(&self) -> PathBuf {
        match self.outputs.first() {
            Some(p) => {
                let mut s = p.as_os_str().to_owned();
                s.push(".manifest.json");
                PathBuf::from(s)
            }
            None => PathBuf::from("orthofit.manifest.json"),
        }
    }

    pub fn write(mut self, path: Option<&Path>) -> Result<PathBuf> {
        self.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let path = path.map(Path::to_path_buf).unwrap_or_else(|| self.default_path());
        let text = serde_json::to_string_pretty(&self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(path)
    }
}
