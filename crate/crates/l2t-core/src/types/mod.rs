//! Shared domain vocabulary: languages, prompt settings, questions,
//! transcripts, and logprob traces.
//!
//! Everything here is immutable after construction and safe to share
//! across threads.

mod lang;
mod mcq;
mod setting;
mod trace;
mod transcript;

pub use lang::{LanguageCode, Script};
pub use mcq::{AnswerLetter, ItemError, MCQItem};
pub use setting::{validate_setting, InvalidSetting, L2TSetting, SettingKind};
pub use trace::{TokenLogProbTrace, TraceError};
pub use transcript::{EvalTranscript, RequestParams};
