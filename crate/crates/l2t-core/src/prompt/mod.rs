//! Prompt construction for every evaluation setting.
//!
//! Templates are operator-edited files, never code: several source tables
//! exist only as images and are transcribed once, then frozen by golden
//! tests. Builders are pure functions over the loaded set.

mod build;
mod matrix;
mod templates;

pub use build::{
    build_prompt_pair, build_system_prompt, build_user_prompt, PromptError, PromptPair,
};
pub use matrix::enumerate_matrix;
pub use templates::{PromptTemplateSet, TemplateError, TemplateKind};
