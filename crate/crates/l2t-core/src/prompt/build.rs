//! Pure prompt builders. Equal inputs give identical bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::templates::{PromptTemplateSet, OUTPUT_SLOT, PERSONA_SLOT, THOUGHT_SLOT};
use crate::types::{InvalidSetting, L2TSetting, MCQItem, SettingKind};

/// The system and user turns for one cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPair {
    /// Empty for the baseline setting.
    pub system_prompt: String,
    pub user_prompt: String,
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error(transparent)]
    Setting(#[from] InvalidSetting),
}

/// Build the system prompt for a setting.
///
/// Baseline produces an empty prompt. The thought-instruction kinds fill
/// the language-slot placeholders with names written in the input
/// language's own tongue; persona kinds substitute the speaker descriptor
/// for the thought language.
pub fn build_system_prompt(
    setting: &L2TSetting,
    templates: &PromptTemplateSet,
) -> Result<String, PromptError> {
    setting.validate()?;
    let lang = templates.for_language(setting.input_lang);
    let prompt = match setting.kind {
        SettingKind::Baseline => String::new(),
        SettingKind::Consistent | SettingKind::Transfer => {
            let thought = setting.thought_lang.expect("validated");
            let template = if setting.kind == SettingKind::Consistent {
                &lang.consistent
            } else {
                &lang.transfer
            };
            template.replace(THOUGHT_SLOT, &lang.names[&thought])
        }
        SettingKind::Align => {
            let thought = setting.thought_lang.expect("validated");
            let output = setting.output_lang.expect("validated");
            lang.align
                .replace(THOUGHT_SLOT, &lang.names[&thought])
                .replace(OUTPUT_SLOT, &lang.names[&output])
        }
        SettingKind::PersonaConsistent | SettingKind::PersonaTransfer => {
            let thought = setting.thought_lang.expect("validated");
            let variant = setting.persona_variant.expect("validated") as usize;
            lang.personas[variant].replace(PERSONA_SLOT, &lang.persona_descriptors[&thought])
        }
    };
    Ok(prompt)
}

/// Build the user prompt: the per-language instruction, the question, and
/// the options as `A. <text>` lines, joined by single newlines.
pub fn build_user_prompt(item: &MCQItem, templates: &PromptTemplateSet) -> String {
    let lang = templates.for_language(item.language());
    let mut prompt = String::with_capacity(256);
    prompt.push_str(&lang.instruction);
    prompt.push('\n');
    prompt.push_str(item.question());
    for (letter, text) in item.options() {
        prompt.push('\n');
        prompt.push_str(&format!("{letter}. {text}"));
    }
    prompt
}

/// Build both turns for one (item, setting) cell.
pub fn build_prompt_pair(
    item: &MCQItem,
    setting: &L2TSetting,
    templates: &PromptTemplateSet,
) -> Result<PromptPair, PromptError> {
    Ok(PromptPair {
        system_prompt: build_system_prompt(setting, templates)?,
        user_prompt: build_user_prompt(item, templates),
    })
}
