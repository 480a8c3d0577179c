//! Artifact files and the manifests written next to them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const ARTIFACT_VERSION: &str = concat!("weaktype-cli/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Serialize)]
pub struct Parameter {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Vec<Parameter>,
    pub seed: u64,
    pub artifact_version: String,
    pub timestamp: String,
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            parameters: Vec::new(),
            seed,
            artifact_version: ARTIFACT_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            artifacts: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push(Parameter {
            key: key.to_string(),
            value: value.to_string(),
        });
        self
    }
}

/// Where a command's artifact goes: stdout, or a file in `--out` plus its
/// manifest.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<&Path>) -> CliResult<Self> {
        if let Some(d) = dir {
            if !d.is_dir() {
                return Err(CliError::io(
                    d,
                    std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        "output directory does not exist",
                    ),
                ));
            }
        }
        Ok(Self {
            dir: dir.map(Path::to_path_buf),
        })
    }

    /// Writes `body` as `file_name` (or prints it) and, for files, the
    /// manifest as `<stem>.manifest.json`.
    pub fn emit(&self, file_name: &str, body: &str, mut manifest: RunManifest) -> CliResult<()> {
        let Some(dir) = &self.dir else {
            print!("{body}");
            return Ok(());
        };
        let path = dir.join(file_name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        manifest.artifacts.push(file_name.to_string());
        let stem = Path::new(file_name)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(file_name);
        let mpath = dir.join(format!("{stem}.manifest.json"));
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(&mpath, text).map_err(|e| CliError::io(&mpath, e))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}
