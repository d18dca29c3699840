//! Prompt-logprob providers.

use std::collections::BTreeMap;

use super::chat::ProviderError;
use super::scripted::ScriptedModelSpec;
use crate::analysis::detect_language;
use crate::types::{LanguageCode, TokenLogProbTrace};

/// Anything that can echo per-token logprobs for a prompt context.
///
/// The returned trace brackets exactly the user-prompt tokens: system
/// tokens, when present, sit at indices below `k` and are context only.
pub trait LogprobProvider: Send + Sync {
    fn echo_logprobs(
        &self,
        system_prompt: &str,
        user_prompt: &str,
    ) -> Result<TokenLogProbTrace, ProviderError>;
}

/// Deterministic stub: whitespace tokenization, one configured logprob for
/// every token, optionally varied by the user prompt's detected language.
#[derive(Debug, Clone)]
pub struct StubLogprobProvider {
    default_logprob: f64,
    per_language: BTreeMap<LanguageCode, f64>,
}

impl StubLogprobProvider {
    pub fn constant(logprob: f64) -> Self {
        StubLogprobProvider {
            default_logprob: logprob,
            per_language: BTreeMap::new(),
        }
    }

    pub fn with_per_language(
        default_logprob: f64,
        per_language: BTreeMap<LanguageCode, f64>,
    ) -> Self {
        StubLogprobProvider {
            default_logprob,
            per_language,
        }
    }

    /// The stub paired with a scripted model spec.
    pub fn from_spec(spec: &ScriptedModelSpec) -> Self {
        StubLogprobProvider {
            default_logprob: spec.logprob_default,
            per_language: spec.logprob_per_language.clone(),
        }
    }

    fn value_for(&self, user_prompt: &str) -> f64 {
        detect_language(user_prompt)
            .and_then(|lang| self.per_language.get(&lang).copied())
            .unwrap_or(self.default_logprob)
    }
}

impl LogprobProvider for StubLogprobProvider {
    fn echo_logprobs(
        &self,
        system_prompt: &str,
        user_prompt: &str,
    ) -> Result<TokenLogProbTrace, ProviderError> {
        let system_tokens: Vec<String> = system_prompt
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let user_tokens: Vec<String> = user_prompt.split_whitespace().map(str::to_string).collect();
        if user_tokens.is_empty() {
            return Err(ProviderError::InvalidRequest(
                "user prompt has no tokens".into(),
            ));
        }
        let value = self.value_for(user_prompt);
        let k = system_tokens.len();
        let mut tokens = system_tokens;
        tokens.extend(user_tokens);
        let m = tokens.len() - 1;
        let logprobs = vec![value; tokens.len()];
        TokenLogProbTrace::new(tokens, logprobs, k, m)
            .map_err(|err| ProviderError::InvalidRequest(err.to_string()))
    }
}
