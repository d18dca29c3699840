//! Perplexity over user-prompt tokens, and the filtered-question study.

mod study;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use study::{ppl_csv, ppl_markdown, ppl_study, PartitionSide, PplStudyRow, PplStudyTable};

use crate::provider::ProviderError;
use crate::types::{L2TSetting, TokenLogProbTrace, TraceError};
use crate::util::ordered_sum;

#[derive(Debug, Error)]
pub enum PplError {
    #[error("user window is empty: k={k} m={m}")]
    EmptyWindow { k: usize, m: usize },
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("item {item_id} has no variant in language {language}")]
    MissingVariant { item_id: String, language: String },
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("failed to build prompts: {0}")]
    Prompt(String),
}

/// One computed perplexity, with the window it covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PplRecord {
    pub item_id: String,
    pub setting: L2TSetting,
    pub ppl: f64,
    pub window: (usize, usize),
}

/// Perplexity of the user-prompt window:
/// `exp(-(1/(m-k+1)) * sum(logprobs[k..=m]))`.
///
/// Only user-prompt tokens enter the sum; context before `k` conditions
/// the model but is never summed. The window sum runs in a fixed order,
/// making the result exactly invariant under token permutations.
pub fn compute_ppl(trace: &TokenLogProbTrace) -> Result<f64, PplError> {
    trace.validate().map_err(|err| match err {
        TraceError::EmptyWindow { k, m } => PplError::EmptyWindow { k, m },
        other => PplError::InvalidTrace(other.to_string()),
    })?;
    let window = trace.window_logprobs();
    let sum = ordered_sum(window.to_vec());
    Ok((-sum / window.len() as f64).exp())
}
