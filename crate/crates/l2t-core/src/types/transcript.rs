//! Records of one model interaction.

use serde::{Deserialize, Serialize};

use super::lang::LanguageCode;
use super::mcq::AnswerLetter;
use super::setting::L2TSetting;

/// Sampling parameters actually sent with a request. Absent temperature or
/// top-p means the provider's defaults were used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestParams {
    pub max_new_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for RequestParams {
    fn default() -> Self {
        RequestParams {
            max_new_tokens: 1024,
            temperature: None,
            top_p: None,
            seed: None,
        }
    }
}

/// One evaluated (item, setting, run) cell: the prompts sent, the raw
/// response, and what the analysis made of it.
///
/// `correct` is derived, never supplied: it is true exactly when the
/// extracted letter equals the item's gold letter, so an extraction
/// failure always scores as incorrect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalTranscript {
    pub item_id: String,
    pub setting: L2TSetting,
    pub run_index: u32,
    pub system_prompt: String,
    pub user_prompt: String,
    pub raw_response: String,
    /// Extracted option letter; `None` marks an extraction failure.
    pub extracted: Option<AnswerLetter>,
    /// Detected response language; `None` means undetermined.
    pub detected_lang: Option<LanguageCode>,
    pub correct: bool,
    pub request_params: RequestParams,
    /// Set when the provider reported that the response was cut off.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<bool>,
    /// Set when extraction saw more than one candidate letter after the
    /// final marker; such transcripts deserve a manual look.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub needs_audit: bool,
}

impl EvalTranscript {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        item_id: impl Into<String>,
        gold: AnswerLetter,
        setting: L2TSetting,
        run_index: u32,
        system_prompt: impl Into<String>,
        user_prompt: impl Into<String>,
        raw_response: impl Into<String>,
        extracted: Option<AnswerLetter>,
        detected_lang: Option<LanguageCode>,
        request_params: RequestParams,
    ) -> Self {
        EvalTranscript {
            item_id: item_id.into(),
            setting,
            run_index,
            system_prompt: system_prompt.into(),
            user_prompt: user_prompt.into(),
            raw_response: raw_response.into(),
            extracted,
            detected_lang,
            correct: extracted == Some(gold),
            request_params,
            truncated: None,
            needs_audit: false,
        }
    }
}
