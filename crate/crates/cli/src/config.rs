//! Shared settings with a strict precedence: command-line flag, then config
//! file, then built-in default. The merged result is echoed into every
//! report so a run can be reproduced from its output alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Flat key/value config file (TOML). Every field is optional; unknown keys
/// are rejected so typos fail loudly.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// The settings a run actually used, after merging.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Effective {
    pub seed: u64,
    pub jobs: usize,
    pub cache_dir: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub endpoint: String,
    pub model: String,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_JOBS: usize = 4;
pub const DEFAULT_ENDPOINT: &str = "http://localhost:11434/v1";
pub const DEFAULT_MODEL: &str = "gpt-4o-mini";

impl Effective {
    /// Merge flag-level overrides over the file values over the defaults.
    pub fn resolve(
        file: &FileConfig,
        seed: Option<u64>,
        jobs: Option<usize>,
        cache_dir: Option<PathBuf>,
        kb: Option<PathBuf>,
        endpoint: Option<String>,
        model: Option<String>,
    ) -> Effective {
        Effective {
            seed: seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            jobs: jobs.or(file.jobs).unwrap_or(DEFAULT_JOBS),
            cache_dir: cache_dir.or_else(|| file.cache_dir.clone()),
            kb: kb.or_else(|| file.kb.clone()),
            endpoint: endpoint
                .or_else(|| file.endpoint.clone())
                .unwrap_or_else(|| DEFAULT_ENDPOINT.to_string()),
            model: model
                .or_else(|| file.model.clone())
                .unwrap_or_else(|| DEFAULT_MODEL.to_string()),
        }
    }

    /// Stable digest of the merged settings.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&canonical)[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values_override_defaults() {
        let file = FileConfig {
            seed: Some(7),
            jobs: None,
            ..FileConfig::default()
        };
        let merged = Effective::resolve(&file, None, None, None, None, None, None);
        assert_eq!(merged.seed, 7);
        assert_eq!(merged.jobs, DEFAULT_JOBS);

        let overridden = Effective::resolve(&file, Some(9), Some(2), None, None, None, None);
        assert_eq!(overridden.seed, 9);
        assert_eq!(overridden.jobs, 2);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = toml::from_str::<FileConfig>("sede = 3\n").unwrap_err();
        assert!(err.to_string().contains("sede"));
    }

    #[test]
    fn hash_tracks_every_field() {
        let file = FileConfig::default();
        let a = Effective::resolve(&file, Some(1), None, None, None, None, None);
        let b = Effective::resolve(&file, Some(2), None, None, None, None, None);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), a.hash());
    }
}
