//! A deterministic scripted model.
//!
//! The double stores each fact in specific languages. It answers correctly
//! exactly when the fact is stored in the effective thought language, so a
//! protocol run against it reproduces, by construction, the knowledge
//! coupling between facts and the language they were learned in.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::chat::{ChatProvider, ChatRequest, ChatResponse, ProviderError};
use crate::analysis::MarkerTable;
use crate::prompt::{build_prompt_pair, PromptError, PromptTemplateSet};
use crate::types::{AnswerLetter, L2TSetting, LanguageCode, MCQItem, SettingKind};

/// Which language the scripted model answers in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnswerLanguagePolicy {
    /// Honor the prompt: a pinned output slot wins, then an explicit
    /// thought instruction, then the input language.
    #[default]
    FollowInstructions,
    /// Always answer in the input language.
    InputLanguage,
    /// Always answer in the effective thought language.
    ThoughtLanguage,
}

impl AnswerLanguagePolicy {
    /// Total over every valid setting.
    pub fn response_language(self, setting: &L2TSetting) -> LanguageCode {
        let thought = setting.thought_lang.unwrap_or(setting.input_lang);
        match self {
            AnswerLanguagePolicy::FollowInstructions => match setting.output_lang {
                Some(output) => output,
                None if setting.kind != SettingKind::Baseline => thought,
                None => setting.input_lang,
            },
            AnswerLanguagePolicy::InputLanguage => setting.input_lang,
            AnswerLanguagePolicy::ThoughtLanguage => thought,
        }
    }
}

fn default_logprob() -> f64 {
    // ln(0.5): each token carries one bit.
    -std::f64::consts::LN_2
}

/// Behavior of the scripted model, loadable from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptedModelSpec {
    /// (item id, language) pairs meaning "this fact is stored in this
    /// language".
    pub knowledge: BTreeSet<(String, LanguageCode)>,
    /// Letter returned when the fact is absent.
    pub distractor: AnswerLetter,
    #[serde(default)]
    pub answer_language_policy: AnswerLanguagePolicy,
    /// Per-token logprob the paired stub logprob backend reports.
    #[serde(default = "default_logprob")]
    pub logprob_default: f64,
    /// Per-language overrides, keyed by the user prompt's detected
    /// language.
    #[serde(default)]
    pub logprob_per_language: BTreeMap<LanguageCode, f64>,
}

impl ScriptedModelSpec {
    pub fn new(
        knowledge: impl IntoIterator<Item = (String, LanguageCode)>,
        distractor: AnswerLetter,
    ) -> Self {
        ScriptedModelSpec {
            knowledge: knowledge.into_iter().collect(),
            distractor,
            answer_language_policy: AnswerLanguagePolicy::default(),
            logprob_default: default_logprob(),
            logprob_per_language: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ScriptedSpecError> {
        let bytes = std::fs::read(path).map_err(|source| ScriptedSpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_slice(&bytes).map_err(|source| ScriptedSpecError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn knows(&self, item_id: &str, language: LanguageCode) -> bool {
        self.knowledge.contains(&(item_id.to_string(), language))
    }
}

#[derive(Debug, Error)]
pub enum ScriptedSpecError {
    #[error("failed to read scripted model spec {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse scripted model spec {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
}

/// The scripted model itself: a pure function of (spec, item, setting).
#[derive(Debug, Clone)]
pub struct ScriptedModel {
    spec: ScriptedModelSpec,
    markers: MarkerTable,
}

impl ScriptedModel {
    pub fn new(spec: ScriptedModelSpec) -> Self {
        ScriptedModel {
            spec,
            markers: MarkerTable::default(),
        }
    }

    pub fn with_markers(spec: ScriptedModelSpec, markers: MarkerTable) -> Self {
        ScriptedModel { spec, markers }
    }

    pub fn spec(&self) -> &ScriptedModelSpec {
        &self.spec
    }

    /// The letter this model will pick for a cell.
    ///
    /// A fact is found under the item's own id or its paired variant's
    /// id, so one knowledge entry covers both language records of a
    /// question.
    pub fn answer_for(&self, item: &MCQItem, setting: &L2TSetting) -> AnswerLetter {
        let thought = setting.thought_lang.unwrap_or(setting.input_lang);
        let known = self.spec.knows(item.id(), thought)
            || item
                .paired_id()
                .is_some_and(|pair| self.spec.knows(pair, thought));
        if known {
            item.gold()
        } else {
            self.spec.distractor
        }
    }

    /// Produce the full scripted response: a short deliberation in the
    /// policy's response language, closed by that language's marker
    /// sentence naming the chosen letter.
    pub fn respond(&self, item: &MCQItem, setting: &L2TSetting) -> String {
        let letter = self.answer_for(item, setting);
        let lang = self.spec.answer_language_policy.response_language(setting);
        let marker = self.markers.get(lang);
        match lang {
            LanguageCode::En => format!(
                "Considering each option in turn points to a single choice. {marker} {letter}."
            ),
            LanguageCode::Zh => {
                format!("逐一考虑每个选项后可以得出明确的结论。{marker}{letter}。")
            }
            LanguageCode::Ko => {
                format!("각 선택지를 차례로 살펴보면 분명한 결론이 나온다. {marker} {letter}.")
            }
            LanguageCode::Ar => {
                format!("بعد النظر في كل خيار نصل إلى استنتاج واضح. {marker} {letter}.")
            }
        }
    }
}

/// The scripted model exposed behind the chat interface.
///
/// Prompts are deterministic per cell, so the provider indexes every
/// scheduled (item, setting) pair by its built prompt bytes and resolves
/// incoming requests by exact lookup.
pub struct ScriptedChatProvider {
    model: ScriptedModel,
    cells: HashMap<(String, String), (MCQItem, L2TSetting)>,
}

impl ScriptedChatProvider {
    pub fn new(
        model: ScriptedModel,
        cells: &[(MCQItem, L2TSetting)],
        templates: &PromptTemplateSet,
    ) -> Result<Self, PromptError> {
        let mut index = HashMap::with_capacity(cells.len());
        for (item, setting) in cells {
            let prompts = build_prompt_pair(item, setting, templates)?;
            index.insert(
                (prompts.system_prompt, prompts.user_prompt),
                (item.clone(), *setting),
            );
        }
        Ok(ScriptedChatProvider {
            model,
            cells: index,
        })
    }

    pub fn model(&self) -> &ScriptedModel {
        &self.model
    }
}

impl ChatProvider for ScriptedChatProvider {
    fn provider_id(&self) -> &str {
        "scripted"
    }

    fn model_id(&self) -> &str {
        "scripted-v1"
    }

    fn chat(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        if request.max_new_tokens == 0 {
            return Err(ProviderError::InvalidRequest(
                "max_new_tokens must be at least 1".into(),
            ));
        }
        let key = (request.system_prompt.clone(), request.user_prompt.clone());
        let (item, setting) = self.cells.get(&key).ok_or_else(|| {
            ProviderError::Rejection("prompt does not correspond to a scheduled cell".into())
        })?;
        Ok(ChatResponse::text(self.model.respond(item, setting)))
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::analysis::{detect_language, extract_answer};

    fn item(id: &str, language: LanguageCode, gold: AnswerLetter) -> MCQItem {
        let options: BTreeMap<_, _> = [
            (AnswerLetter::A, "first".to_string()),
            (AnswerLetter::B, "second".to_string()),
            (AnswerLetter::C, "third".to_string()),
        ]
        .into_iter()
        .collect();
        MCQItem::new(id, "test", None, language, "?", options, gold, None).unwrap()
    }

    fn korean_bound_model() -> ScriptedModel {
        ScriptedModel::new(ScriptedModelSpec::new(
            [("q1".to_string(), LanguageCode::Ko)],
            AnswerLetter::A,
        ))
    }

    #[test]
    fn baseline_misses_a_fact_stored_elsewhere() {
        let model = korean_bound_model();
        let q1 = item("q1", LanguageCode::En, AnswerLetter::B);
        let setting = L2TSetting::baseline(LanguageCode::En);
        // Thought defaults to the input language; the fact lives in KO.
        assert_eq!(model.answer_for(&q1, &setting), AnswerLetter::A);
        let response = model.respond(&q1, &setting);
        assert!(response.ends_with("Therefore, the answer is A."));
    }

    #[test]
    fn align_reaches_the_fact_and_answers_in_english() {
        let model = korean_bound_model();
        let q1 = item("q1", LanguageCode::En, AnswerLetter::B);
        let setting = L2TSetting::align(LanguageCode::En, LanguageCode::Ko).unwrap();
        assert_eq!(model.answer_for(&q1, &setting), AnswerLetter::B);
        let response = model.respond(&q1, &setting);
        assert!(response.ends_with("Therefore, the answer is B."));
        assert_eq!(detect_language(&response), Some(LanguageCode::En));
    }

    #[test]
    fn consistent_korean_answers_in_korean() {
        let model = korean_bound_model();
        let q1 = item("q1", LanguageCode::Ko, AnswerLetter::B);
        let setting = L2TSetting::consistent(LanguageCode::Ko);
        assert_eq!(model.answer_for(&q1, &setting), AnswerLetter::B);
        let response = model.respond(&q1, &setting);
        assert_eq!(detect_language(&response), Some(LanguageCode::Ko));
        let extraction = extract_answer(&response, &MarkerTable::default());
        assert_eq!(extraction.letter, Some(AnswerLetter::B));
    }

    #[test]
    fn responses_are_deterministic() {
        let model = korean_bound_model();
        let q1 = item("q1", LanguageCode::Ko, AnswerLetter::C);
        let setting = L2TSetting::transfer(LanguageCode::Ko, LanguageCode::En).unwrap();
        assert_eq!(model.respond(&q1, &setting), model.respond(&q1, &setting));
    }

    #[test]
    fn every_response_language_round_trips_through_analysis() {
        // Whatever language the policy picks, the emitted response must
        // detect as that language and the letter must extract again.
        let spec = ScriptedModelSpec::new(
            LanguageCode::ALL.map(|lang| ("q1".to_string(), lang)),
            AnswerLetter::A,
        );
        let model = ScriptedModel::new(spec);
        let markers = MarkerTable::default();
        for lang in LanguageCode::ALL {
            let q1 = item("q1", lang, AnswerLetter::C);
            let setting = L2TSetting::consistent(lang);
            let response = model.respond(&q1, &setting);
            assert_eq!(
                detect_language(&response),
                Some(lang),
                "response for {lang} misdetected: {response}"
            );
            let extraction = extract_answer(&response, &markers);
            assert_eq!(
                extraction.letter,
                Some(AnswerLetter::C),
                "letter lost for {lang}: {response}"
            );
        }
    }

    #[test]
    fn policy_follows_output_then_thought_then_input() {
        let policy = AnswerLanguagePolicy::FollowInstructions;
        let align = L2TSetting::align(LanguageCode::En, LanguageCode::Ko).unwrap();
        assert_eq!(policy.response_language(&align), LanguageCode::En);
        let transfer = L2TSetting::transfer(LanguageCode::En, LanguageCode::Ko).unwrap();
        assert_eq!(policy.response_language(&transfer), LanguageCode::Ko);
        let baseline = L2TSetting::baseline(LanguageCode::Zh);
        assert_eq!(policy.response_language(&baseline), LanguageCode::Zh);
    }

    fn templates() -> crate::prompt::PromptTemplateSet {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../templates");
        crate::prompt::PromptTemplateSet::load(dir).unwrap()
    }

    #[test]
    fn chat_resolves_scheduled_cells_by_prompt() {
        let templates = templates();
        let q1 = item("q1", LanguageCode::Ko, AnswerLetter::B);
        let setting = L2TSetting::consistent(LanguageCode::Ko);
        let cells = vec![(q1.clone(), setting)];
        let provider = ScriptedChatProvider::new(korean_bound_model(), &cells, &templates).unwrap();

        let prompts = build_prompt_pair(&q1, &setting, &templates).unwrap();
        let request = ChatRequest::new(prompts.system_prompt, prompts.user_prompt);
        let response = provider.chat(&request).unwrap();
        assert!(response.text.ends_with("따라서 답은 B."));
    }

    #[test]
    fn chat_rejects_prompts_outside_the_schedule() {
        let templates = templates();
        let provider = ScriptedChatProvider::new(korean_bound_model(), &[], &templates).unwrap();
        let err = provider
            .chat(&ChatRequest::new("", "surprise"))
            .unwrap_err();
        assert!(matches!(err, ProviderError::Rejection(_)));
    }

    #[test]
    fn chat_requires_a_positive_token_cap() {
        let templates = templates();
        let provider = ScriptedChatProvider::new(korean_bound_model(), &[], &templates).unwrap();
        let mut request = ChatRequest::new("", "x");
        request.max_new_tokens = 0;
        assert!(matches!(
            provider.chat(&request).unwrap_err(),
            ProviderError::InvalidRequest(_)
        ));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = ScriptedModelSpec::new(
            [
                ("q1".to_string(), LanguageCode::Ko),
                ("q2".to_string(), LanguageCode::En),
            ],
            AnswerLetter::D,
        );
        let json = serde_json::to_string(&spec).unwrap();
        let back: ScriptedModelSpec = serde_json::from_str(&json).unwrap();
        assert!(back.knows("q1", LanguageCode::Ko));
        assert!(!back.knows("q1", LanguageCode::En));
        assert_eq!(back.distractor, AnswerLetter::D);
    }
}
