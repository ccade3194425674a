use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliResult;

/// Written next to every output file as `<output>.manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_seconds: f64,
    /// SHA-256 of the model input: the config file bytes, or the canonical
    /// JSON of a builtin model.
    pub config_hash: Option<String>,
    pub outputs: Vec<String>,
}

pub struct ManifestBuilder {
    subcommand: String,
    params: serde_json::Value,
    seed: Option<u64>,
    config_hash: Option<String>,
    start: Instant,
}

impl ManifestBuilder {
    pub fn new(subcommand: &str, params: &impl Serialize) -> Self {
        Self {
            subcommand: subcommand.into(),
            params: serde_json::to_value(params).unwrap_or(serde_json::Value::Null),
            seed: None,
            config_hash: None,
            start: Instant::now(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn config_hash(mut self, hash: Option<String>) -> Self {
        self.config_hash = hash;
        self
    }

    /// Writes the manifest beside the first output and returns its path.
    pub fn write(self, outputs: &[&Path]) -> CliResult<PathBuf> {
        let manifest = RunManifest {
            subcommand: self.subcommand,
            params: self.params,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_seconds: self.start.elapsed().as_secs_f64(),
            config_hash: self.config_hash,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        };
        let path = manifest_path(outputs[0]);
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(path)
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
