//! Per-token log-probability traces with a user-prompt window.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Why a trace could not be constructed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace has {tokens} tokens but {logprobs} logprobs")]
    LengthMismatch { tokens: usize, logprobs: usize },
    #[error("user window [{k}, {m}] is out of bounds for {len} tokens")]
    WindowOutOfBounds { k: usize, m: usize, len: usize },
    #[error("user window start {k} exceeds end {m}")]
    EmptyWindow { k: usize, m: usize },
}

/// Ordered per-token natural-log probabilities for a prompt context.
///
/// Indices `k..=m` bracket exactly the user-prompt tokens. Any tokens
/// before `k` (a system prompt) condition the model but are never summed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenLogProbTrace {
    tokens: Vec<String>,
    logprobs: Vec<f64>,
    k: usize,
    m: usize,
}

impl TokenLogProbTrace {
    pub fn new(
        tokens: Vec<String>,
        logprobs: Vec<f64>,
        k: usize,
        m: usize,
    ) -> Result<Self, TraceError> {
        if tokens.len() != logprobs.len() {
            return Err(TraceError::LengthMismatch {
                tokens: tokens.len(),
                logprobs: logprobs.len(),
            });
        }
        if k > m {
            return Err(TraceError::EmptyWindow { k, m });
        }
        if m >= tokens.len() {
            return Err(TraceError::WindowOutOfBounds {
                k,
                m,
                len: tokens.len(),
            });
        }
        Ok(TokenLogProbTrace {
            tokens,
            logprobs,
            k,
            m,
        })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn logprobs(&self) -> &[f64] {
        &self.logprobs
    }

    /// Index of the first user-prompt token.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Index of the last user-prompt token.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of tokens in the user-prompt window.
    pub fn window_len(&self) -> usize {
        self.m - self.k + 1
    }

    /// Logprobs of the user-prompt tokens only.
    pub fn window_logprobs(&self) -> &[f64] {
        &self.logprobs[self.k..=self.m]
    }

    /// Re-check invariants, e.g. after deserializing.
    pub fn validate(&self) -> Result<(), TraceError> {
        if self.tokens.len() != self.logprobs.len() {
            return Err(TraceError::LengthMismatch {
                tokens: self.tokens.len(),
                logprobs: self.logprobs.len(),
            });
        }
        if self.k > self.m {
            return Err(TraceError::EmptyWindow {
                k: self.k,
                m: self.m,
            });
        }
        if self.m >= self.tokens.len() {
            return Err(TraceError::WindowOutOfBounds {
                k: self.k,
                m: self.m,
                len: self.tokens.len(),
            });
        }
        Ok(())
    }
}
