//! Loading, validating, filtering, and pairing MCQ datasets.
//!
//! On-disk format is one JSON record per line with fields {id, dataset,
//! topic, language, question, options, answer, paired_id}. Source
//! benchmarks ship in heterogeneous formats; operators normalize into
//! this shape once.

mod manifest;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use manifest::{DatasetEntry, DatasetManifest, ManifestError};

use crate::provider::{ProviderError, Translator};
use crate::types::{LanguageCode, MCQItem};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path} line {line}: {reason}")]
    Schema {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{path} line {line}: record declares {found}, expected {expected}")]
    LanguageMismatch {
        path: String,
        line: usize,
        found: LanguageCode,
        expected: LanguageCode,
    },
    #[error("{path}: expected {expected} records, found {found}")]
    CountMismatch {
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("item {item_id}: translation of {part} failed: {source}")]
    Translation {
        item_id: String,
        part: String,
        source: ProviderError,
    },
    #[error("item {item_id} is already in {language}")]
    SameLanguage {
        item_id: String,
        language: LanguageCode,
    },
}

/// Per-dataset topic allowlists.
///
/// An item passes only when its dataset has an allowlist naming its topic;
/// items without a topic never pass an active filter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicFilter {
    pub allow: BTreeMap<String, BTreeSet<String>>,
}

impl TopicFilter {
    pub fn single(dataset: impl Into<String>, topics: impl IntoIterator<Item = String>) -> Self {
        let mut allow = BTreeMap::new();
        allow.insert(dataset.into(), topics.into_iter().collect());
        TopicFilter { allow }
    }

    fn admits(&self, item: &MCQItem) -> bool {
        let Some(topics) = self.allow.get(item.dataset()) else {
            return false;
        };
        item.topic().is_some_and(|t| topics.contains(t))
    }
}

/// The factual-topic allowlists the harness ships per language.
pub fn default_topic_allowlist(language: LanguageCode) -> &'static [&'static str] {
    match language {
        LanguageCode::Zh => &[
            "Food Culture",
            "Foreign Policy",
            "History",
            "Literature",
            "Traditional Chinese Medicine",
        ],
        LanguageCode::Ko => &[
            "Economy",
            "Geography",
            "History",
            "Law",
            "Politics",
            "Popular Culture",
            "Society",
            "Tradition",
        ],
        LanguageCode::Ar => &["Islamic Studies"],
        LanguageCode::En => &[],
    }
}

/// Load and validate one dataset file, requiring every record to declare
/// `expected_language`. Fails on the first malformed record.
pub fn load_dataset(
    path: &Path,
    expected_language: LanguageCode,
) -> Result<Vec<MCQItem>, DatasetError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: display.clone(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut items = Vec::new();
    let mut seen_ids = HashSet::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| DatasetError::Io {
            path: display.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let item: MCQItem = serde_json::from_str(&line).map_err(|err| DatasetError::Schema {
            path: display.clone(),
            line: line_no,
            reason: err.to_string(),
        })?;
        item.validate().map_err(|err| DatasetError::Schema {
            path: display.clone(),
            line: line_no,
            reason: err.to_string(),
        })?;
        if item.language() != expected_language {
            return Err(DatasetError::LanguageMismatch {
                path: display.clone(),
                line: line_no,
                found: item.language(),
                expected: expected_language,
            });
        }
        if !seen_ids.insert(item.id().to_string()) {
            return Err(DatasetError::Schema {
                path: display.clone(),
                line: line_no,
                reason: format!("duplicate item id {:?}", item.id()),
            });
        }
        items.push(item);
    }
    Ok(items)
}

/// Write items back out, one JSON record per line.
pub fn write_dataset(path: &Path, items: &[MCQItem]) -> Result<(), DatasetError> {
    let display = path.display().to_string();
    let mut file = std::fs::File::create(path).map_err(|source| DatasetError::Io {
        path: display.clone(),
        source,
    })?;
    for item in items {
        let line = serde_json::to_string(item).expect("item serializes");
        writeln!(file, "{line}").map_err(|source| DatasetError::Io {
            path: display.clone(),
            source,
        })?;
    }
    Ok(())
}

/// Record count per topic, with untagged items under `(none)`.
pub fn topic_counts(items: &[MCQItem]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for item in items {
        let key = item.topic().unwrap_or("(none)").to_string();
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
}

/// Keep items whose topic the filter admits, preserving order.
pub fn apply_topic_filter(items: &[MCQItem], filter: &TopicFilter) -> Vec<MCQItem> {
    items
        .iter()
        .filter(|item| filter.admits(item))
        .cloned()
        .collect()
}

/// Translate each item into `target`, producing (original, translated)
/// pairs with the pairing recorded in both directions. Gold letters and
/// option order are preserved exactly.
pub fn build_translation_pairs(
    items: &[MCQItem],
    translator: &dyn Translator,
    target: LanguageCode,
) -> Result<Vec<(MCQItem, MCQItem)>, DatasetError> {
    let mut pairs = Vec::with_capacity(items.len());
    for item in items {
        let source = item.language();
        if source == target {
            return Err(DatasetError::SameLanguage {
                item_id: item.id().to_string(),
                language: source,
            });
        }
        let question = translator
            .translate(item.question(), source, target)
            .map_err(|err| DatasetError::Translation {
                item_id: item.id().to_string(),
                part: "question".into(),
                source: err,
            })?;
        let mut options = BTreeMap::new();
        for (letter, text) in item.options() {
            let translated = translator.translate(text, source, target).map_err(|err| {
                DatasetError::Translation {
                    item_id: item.id().to_string(),
                    part: format!("option {letter}"),
                    source: err,
                }
            })?;
            options.insert(letter, translated);
        }
        let new_id = format!("{}-{}", item.id(), target.dir_name());
        pairs.push(item.translated_copy(new_id, target, question, options));
    }
    Ok(pairs)
}
