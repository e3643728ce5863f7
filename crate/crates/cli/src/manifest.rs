use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dynmix::FitConfig;

use crate::error::CliError;
use crate::output::write_atomic;

pub const SOFTWARE: &str = concat!("dynmix ", env!("CARGO_PKG_VERSION"));

/// Record of a `simulate` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateManifest {
    pub software: String,
    pub command: String,
    pub design: String,
    pub curve: String,
    pub length: u64,
    pub seed: u64,
    pub data_sha256: String,
    pub truth_sha256: String,
    pub duration_seconds: f64,
}

/// Record of a `fit` run; `config` with the data reproduces the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitManifest {
    pub software: String,
    pub command: String,
    pub data: PathBuf,
    pub data_sha256: String,
    pub mass: f64,
    pub full_draws: bool,
    pub chains: u64,
    pub kept_draws: usize,
    pub nonfinite_proposals: u64,
    pub duration_seconds: f64,
    pub config: FitConfig,
}

fn to_toml<T: Serialize>(value: &T, path: &Path) -> Result<String, CliError> {
    toml::to_string(value).map_err(|e| CliError::Manifest {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

impl SimulateManifest {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_atomic(path, to_toml(self, path)?.as_bytes())
    }
}

impl FitManifest {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_atomic(path, to_toml(self, path)?.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let manifest: FitManifest = toml::from_str(&text).map_err(|e| CliError::Manifest {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        if manifest.command != "fit" {
            return Err(CliError::Manifest {
                path: path.to_path_buf(),
                detail: format!("recorded command is '{}', not 'fit'", manifest.command),
            });
        }
        Ok(manifest)
    }
}
