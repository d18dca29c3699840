//! Experiment configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{LanguageCode, SettingKind};
use crate::util::short_digest;

/// Which backend answers the cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The deterministic scripted model; needs `scripted_spec`.
    Scripted,
    /// A live HTTP provider; needs `provider_config`.
    Live,
}

fn default_run_count() -> u32 {
    3
}

fn default_concurrency() -> usize {
    4
}

fn default_templates_dir() -> PathBuf {
    PathBuf::from("templates")
}

fn default_cache_dir() -> PathBuf {
    PathBuf::from(".l2t-cache")
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("experiments")
}

/// Everything one experiment needs: data, backend, the setting grid,
/// runs, and directories. Relative paths resolve against the config
/// file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Dataset manifest path.
    pub manifest: PathBuf,
    /// Tags from the manifest to evaluate, in order.
    pub datasets: Vec<String>,
    pub mode: Mode,
    #[serde(default)]
    pub scripted_spec: Option<PathBuf>,
    #[serde(default)]
    pub provider_config: Option<PathBuf>,
    #[serde(default = "default_templates_dir")]
    pub templates_dir: PathBuf,
    /// Setting kinds to expand over the items.
    pub kinds: Vec<SettingKind>,
    /// Thought languages for the kinds with a free thought slot.
    #[serde(default)]
    pub thought_langs: Vec<LanguageCode>,
    #[serde(default = "default_run_count")]
    pub run_count: u32,
    /// Upper bound on concurrent provider calls.
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default = "default_cache_dir")]
    pub cache_dir: PathBuf,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Optional per-run seeds; unset runs use provider-default sampling.
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Override for the 1024-token default cap.
    #[serde(default)]
    pub max_new_tokens: Option<u32>,
    /// Serve every run of a cell from one cached response. Off by
    /// default: repeated runs against sampling models must stay distinct
    /// calls. Worth enabling only for deterministic backends.
    #[serde(default)]
    pub collapse_runs: bool,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse config {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// A parsed config plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.run_count < 1 {
            return Err(ConfigError::Invalid("run_count must be at least 1".into()));
        }
        if self.concurrency < 1 {
            return Err(ConfigError::Invalid(
                "concurrency must be at least 1".into(),
            ));
        }
        if self.datasets.is_empty() {
            return Err(ConfigError::Invalid("datasets must not be empty".into()));
        }
        if self.kinds.is_empty() {
            return Err(ConfigError::Invalid("kinds must not be empty".into()));
        }
        if let Some(cap) = self.max_new_tokens {
            if cap == 0 {
                return Err(ConfigError::Invalid(
                    "max_new_tokens must be at least 1".into(),
                ));
            }
        }
        match self.mode {
            Mode::Scripted if self.scripted_spec.is_none() => Err(ConfigError::Invalid(
                "scripted mode requires scripted_spec".into(),
            )),
            Mode::Live if self.provider_config.is_none() => Err(ConfigError::Invalid(
                "live mode requires provider_config".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Stable digest of the whole configuration; distinct configs get
    /// distinct experiment directories.
    pub fn digest(&self) -> String {
        short_digest(&serde_json::to_vec(self).expect("config serializes"))
    }
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: ExperimentConfig =
            toml::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        config.validate()?;
        let base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(LoadedConfig { config, base_dir })
    }

    pub fn from_parts(config: ExperimentConfig, base_dir: impl Into<PathBuf>) -> Self {
        LoadedConfig {
            config,
            base_dir: base_dir.into(),
        }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.resolve(&self.config.manifest)
    }

    pub fn templates_dir(&self) -> PathBuf {
        self.resolve(&self.config.templates_dir)
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.resolve(&self.config.cache_dir)
    }

    /// The content-addressed directory this experiment writes into.
    pub fn experiment_dir(&self) -> PathBuf {
        self.resolve(&self.config.output_dir)
            .join(self.config.digest())
    }
}
