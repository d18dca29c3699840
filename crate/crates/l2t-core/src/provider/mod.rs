//! Uniform access to chat models, logprob echo, and translation, plus the
//! response cache and the deterministic scripted backend.

mod cache;
mod chat;
mod config;
mod http;
mod logprobs;
mod retry;
mod scripted;
mod translate;

pub use cache::{CacheKey, CacheRecord, CachedChat, ResponseCache};
pub use chat::{ChatProvider, ChatRequest, ChatResponse, ProviderError};
pub use config::{LogprobBase, ProviderConfig, ProviderConfigError};
pub use http::HttpProvider;
pub use logprobs::{LogprobProvider, StubLogprobProvider};
pub use retry::{with_retry, RetryPolicy};
pub use scripted::{
    AnswerLanguagePolicy, ScriptedChatProvider, ScriptedModel, ScriptedModelSpec, ScriptedSpecError,
};
pub use translate::{DictionaryEntry, DictionaryTranslator, Translator};
