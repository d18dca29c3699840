//! Provider configuration file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::retry::RetryPolicy;

/// Base the provider reports logprobs in; values are normalized to natural
/// log at the adapter boundary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogprobBase {
    #[default]
    Natural,
    Base2,
}

fn default_true() -> bool {
    true
}

fn default_in_flight() -> usize {
    4
}

/// Connection and capability description of one chat-completion provider.
///
/// Credentials never live here: `auth_env` names the environment variable
/// holding the key.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderConfig {
    /// Stable identifier used in cache keys.
    pub id: String,
    /// Chat-completions endpoint URL.
    pub endpoint: String,
    /// Model identifier sent with every request.
    pub model: String,
    /// Name of the environment variable holding the API key, if any.
    #[serde(default)]
    pub auth_env: Option<String>,
    /// Whether the provider honors a system role. When false, the system
    /// prompt is prepended to the user turn instead.
    #[serde(default = "default_true")]
    pub system_role: bool,
    /// Whether the provider can echo prompt logprobs.
    #[serde(default)]
    pub logprobs: bool,
    /// Echo-completions endpoint for logprobs; defaults to `endpoint`.
    #[serde(default)]
    pub logprob_endpoint: Option<String>,
    #[serde(default)]
    pub logprob_base: LogprobBase,
    /// Upper bound on concurrent in-flight requests.
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    #[serde(default)]
    pub retry: RetryPolicy,
}

#[derive(Debug, Error)]
pub enum ProviderConfigError {
    #[error("failed to read provider config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse provider config {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
    #[error("provider config {path}: {reason}")]
    Invalid { path: String, reason: String },
}

impl ProviderConfig {
    pub fn load(path: &Path) -> Result<Self, ProviderConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ProviderConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: ProviderConfig =
            toml::from_str(&text).map_err(|source| ProviderConfigError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        if config.max_in_flight == 0 {
            return Err(ProviderConfigError::Invalid {
                path: path.display().to_string(),
                reason: "max_in_flight must be at least 1".into(),
            });
        }
        Ok(config)
    }

    /// Resolve the API key from the configured environment variable.
    pub fn api_key(&self) -> Option<String> {
        self.auth_env
            .as_ref()
            .and_then(|name| std::env::var(name).ok())
    }
}
