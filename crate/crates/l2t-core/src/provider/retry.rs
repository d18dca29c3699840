//! Exponential-backoff retry for transport failures.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::chat::ProviderError;

/// Attempt cap and backoff schedule. `delay(n)` grows geometrically from
/// `base_delay`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            base_delay_ms: 250,
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    /// No waiting between attempts; for tests and stub providers.
    pub fn immediate(max_attempts: u32) -> Self {
        RetryPolicy {
            max_attempts,
            base_delay_ms: 0,
            multiplier: 1.0,
        }
    }

    fn delay(&self, completed_attempts: u32) -> Duration {
        let factor = self
            .multiplier
            .powi(completed_attempts.saturating_sub(1) as i32);
        Duration::from_millis((self.base_delay_ms as f64 * factor) as u64)
    }
}

/// Run `op` until it succeeds or fails non-retriably, retrying transport
/// failures up to the attempt cap. The closure receives the 1-based
/// attempt number; a success short-circuits immediately.
pub fn with_retry<T>(
    policy: &RetryPolicy,
    mut op: impl FnMut(u32) -> Result<T, ProviderError>,
) -> Result<T, ProviderError> {
    let cap = policy.max_attempts.max(1);
    let mut last_message = String::new();
    for attempt in 1..=cap {
        match op(attempt) {
            Ok(value) => return Ok(value),
            Err(err) if err.is_retriable() => {
                if let ProviderError::Transport { message, .. } = err {
                    last_message = message;
                }
                if attempt < cap {
                    let wait = policy.delay(attempt);
                    if !wait.is_zero() {
                        std::thread::sleep(wait);
                    }
                }
            }
            Err(err) => return Err(err),
        }
    }
    Err(ProviderError::Transport {
        attempts: cap,
        message: last_message,
    })
}
