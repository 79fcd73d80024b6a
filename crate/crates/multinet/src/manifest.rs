// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one command run: enough to repeat it and check the inputs
/// are unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize, inputs: &[PathBuf]) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    path: p.clone(),
                    sha256: io::file_digest(p)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            inputs,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let s = serde_json::to_string_pretty(self)?;
        std::fs::write(path, s + "\n").map_err(|e| CliError::io(path, e))
    }

    /// Inputs whose current digest differs from the recorded one.
    pub fn changed_inputs(&self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for i in &self.inputs {
            if io::file_digest(&i.path)? != i.sha256 {
                out.push(i.path.clone());
            }
        }
        Ok(out)
    }
}
