//! Chat-completion requests and the provider trait.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::RequestParams;

/// One chat call. Absent temperature or top-p means the provider's
/// defaults apply; `max_new_tokens` defaults to 1024 and must be at
/// least 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system_prompt: String,
    pub user_prompt: String,
    pub max_new_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChatRequest {
    pub fn new(system_prompt: impl Into<String>, user_prompt: impl Into<String>) -> Self {
        ChatRequest {
            system_prompt: system_prompt.into(),
            user_prompt: user_prompt.into(),
            max_new_tokens: 1024,
            temperature: None,
            top_p: None,
            seed: None,
        }
    }

    pub fn params(&self) -> RequestParams {
        RequestParams {
            max_new_tokens: self.max_new_tokens,
            temperature: self.temperature,
            top_p: self.top_p,
            seed: self.seed,
        }
    }
}

/// Raw model output plus whatever the provider reported about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    /// Set when the provider reported the response was cut at the token
    /// cap; `None` when it said nothing either way.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<bool>,
}

impl ChatResponse {
    pub fn text(text: impl Into<String>) -> Self {
        ChatResponse {
            text: text.into(),
            truncated: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ProviderError {
    /// Retriable transport failure, surfaced once the attempt cap is hit.
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    /// The provider understood and refused: bad auth, malformed request.
    #[error("provider rejected the request: {0}")]
    Rejection(String),
    #[error("provider does not support {0}")]
    CapabilityUnsupported(&'static str),
    /// The dictionary translation stub had no entry for the phrase.
    #[error("no translation entry for {0:?}")]
    TranslationMiss(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

impl ProviderError {
    pub fn is_retriable(&self) -> bool {
        matches!(self, ProviderError::Transport { .. })
    }
}

/// Anything that can answer a chat request.
pub trait ChatProvider: Send + Sync {
    /// Stable identifier used in cache keys.
    fn provider_id(&self) -> &str;
    /// Model identifier used in cache keys.
    fn model_id(&self) -> &str;
    fn chat(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError>;
    /// The provider's own cap on concurrent requests, if it has one; the
    /// scheduler never exceeds it.
    fn max_in_flight(&self) -> Option<usize> {
        None
    }
}
