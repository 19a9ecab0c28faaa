use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

/// Provenance record written next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Enough to rerun: feed it back through `--config` as JSON.
    pub config_echo: serde_json::Value,
    pub outputs: Vec<OutputEntry>,
    pub wall_time: f64,
}

pub fn sha256_file(path: &Path) -> Result<(String, u64), CliError> {
    let data = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = Sha256::digest(&data);
    let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok((hex, data.len() as u64))
}

impl RunManifest {
    pub fn new(
        command: String,
        config_echo: serde_json::Value,
        outputs: &[PathBuf],
        wall_time: f64,
    ) -> Result<Self, CliError> {
        let outputs = outputs
            .iter()
            .map(|p| {
                sha256_file(p).map(|(sha256, bytes)| OutputEntry {
                    path: p.clone(),
                    sha256,
                    bytes,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            config_echo,
            outputs,
            wall_time,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        super::output::write_text(path, &text)
    }
}
