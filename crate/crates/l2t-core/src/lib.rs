//! Provider-agnostic harness for cross-lingual prompting experiments.
//!
//! The pipeline: load multiple-choice QA datasets, expand them against a
//! matrix of prompt settings that steer the model's thought language,
//! query any chat-completion backend (or a deterministic scripted double),
//! extract answers and response languages from free-form output, and
//! aggregate accuracy, input-language ratio, consistency partitions, and
//! user-prompt perplexity into reproducible reports. A corpus builder
//! prepares thought-prefixed continued-pretraining data with the same
//! machinery.

pub mod analysis;
pub mod corpus;
pub mod dataset;
pub mod experiment;
pub mod metrics;
pub mod ppl;
pub mod prompt;
pub mod provider;
pub mod types;
mod util;
