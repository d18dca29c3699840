//! Translation backends behind one interface.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chat::ProviderError;
use crate::types::LanguageCode;

/// A text translation backend. Implementations must reject calls where
/// source and target coincide.
pub trait Translator: Send + Sync {
    fn translate(
        &self,
        text: &str,
        source: LanguageCode,
        target: LanguageCode,
    ) -> Result<String, ProviderError>;
}

fn ensure_distinct(source: LanguageCode, target: LanguageCode) -> Result<(), ProviderError> {
    if source == target {
        Err(ProviderError::InvalidRequest(format!(
            "translation source and target are both {source}"
        )))
    } else {
        Ok(())
    }
}

/// One entry of the dictionary stub's phrase table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DictionaryEntry {
    pub source: LanguageCode,
    pub target: LanguageCode,
    pub from: String,
    pub to: String,
}

/// Exact phrase-table translator for tests and offline runs. Anything not
/// in the table is a `TranslationMiss`.
#[derive(Debug, Clone, Default)]
pub struct DictionaryTranslator {
    entries: HashMap<(LanguageCode, LanguageCode, String), String>,
}

impl DictionaryTranslator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        source: LanguageCode,
        target: LanguageCode,
        from: impl Into<String>,
        to: impl Into<String>,
    ) {
        self.entries
            .insert((source, target, from.into()), to.into());
    }

    /// Load a JSON array of [`DictionaryEntry`] records.
    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        let bytes = std::fs::read(path).map_err(|err| {
            ProviderError::InvalidRequest(format!(
                "failed to read dictionary {}: {err}",
                path.display()
            ))
        })?;
        let entries: Vec<DictionaryEntry> = serde_json::from_slice(&bytes).map_err(|err| {
            ProviderError::InvalidRequest(format!(
                "failed to parse dictionary {}: {err}",
                path.display()
            ))
        })?;
        let mut translator = DictionaryTranslator::new();
        for entry in entries {
            translator.insert(entry.source, entry.target, entry.from, entry.to);
        }
        Ok(translator)
    }
}

impl Translator for DictionaryTranslator {
    fn translate(
        &self,
        text: &str,
        source: LanguageCode,
        target: LanguageCode,
    ) -> Result<String, ProviderError> {
        ensure_distinct(source, target)?;
        self.entries
            .get(&(source, target, text.to_string()))
            .cloned()
            .ok_or_else(|| ProviderError::TranslationMiss(text.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_phrase_hits() {
        let mut dict = DictionaryTranslator::new();
        dict.insert(LanguageCode::Ko, LanguageCode::En, "안녕", "hello");
        let out = dict
            .translate("안녕", LanguageCode::Ko, LanguageCode::En)
            .unwrap();
        assert_eq!(out, "hello");
    }

    #[test]
    fn unmapped_phrase_misses() {
        let dict = DictionaryTranslator::new();
        let err = dict
            .translate("안녕", LanguageCode::Ko, LanguageCode::En)
            .unwrap_err();
        assert!(matches!(err, ProviderError::TranslationMiss(_)));
    }

    #[test]
    fn equal_source_and_target_are_rejected() {
        let dict = DictionaryTranslator::new();
        let err = dict
            .translate("x", LanguageCode::En, LanguageCode::En)
            .unwrap_err();
        assert!(matches!(err, ProviderError::InvalidRequest(_)));
    }

    #[test]
    fn directions_are_independent() {
        let mut dict = DictionaryTranslator::new();
        dict.insert(LanguageCode::Ko, LanguageCode::En, "안녕", "hello");
        let err = dict
            .translate("안녕", LanguageCode::Ko, LanguageCode::Zh)
            .unwrap_err();
        assert!(matches!(err, ProviderError::TranslationMiss(_)));
    }
}
