//! Manifest mapping dataset tags to files, languages, and filters.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{apply_topic_filter, load_dataset, DatasetError, TopicFilter};
use crate::types::{LanguageCode, MCQItem};

/// One dataset entry: where it lives and how to trim it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub path: PathBuf,
    pub language: LanguageCode,
    /// Topic allowlist; omitted means no filtering.
    #[serde(default)]
    pub topics: Option<Vec<String>>,
    /// Assert the post-filter record count; omitted means no assertion.
    #[serde(default)]
    pub expected_count: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub datasets: BTreeMap<String, DatasetEntry>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("failed to read manifest {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse manifest {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
    #[error("dataset {tag}: {source}")]
    Dataset { tag: String, source: DatasetError },
    #[error("manifest names no dataset {0:?}")]
    UnknownTag(String),
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ManifestError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    /// Load one tagged dataset: read, filter by the entry's topics, and
    /// check the expected count when the entry asserts one. Relative
    /// paths resolve against `base_dir`.
    pub fn load_tag(&self, tag: &str, base_dir: &Path) -> Result<Vec<MCQItem>, ManifestError> {
        let entry = self
            .datasets
            .get(tag)
            .ok_or_else(|| ManifestError::UnknownTag(tag.to_string()))?;
        let path = if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            base_dir.join(&entry.path)
        };
        let items =
            load_dataset(&path, entry.language).map_err(|source| ManifestError::Dataset {
                tag: tag.to_string(),
                source,
            })?;
        let items = match &entry.topics {
            Some(topics) => {
                let filter = TopicFilter::single(
                    items
                        .first()
                        .map(|i| i.dataset().to_string())
                        .unwrap_or_default(),
                    topics.iter().cloned(),
                );
                apply_topic_filter(&items, &filter)
            }
            None => items,
        };
        if let Some(expected) = entry.expected_count {
            if items.len() != expected {
                return Err(ManifestError::Dataset {
                    tag: tag.to_string(),
                    source: DatasetError::CountMismatch {
                        path: path.display().to_string(),
                        expected,
                        found: items.len(),
                    },
                });
            }
        }
        Ok(items)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap as Map;

    use super::*;
    use crate::dataset::write_dataset;
    use crate::types::AnswerLetter;

    fn write_sample(dir: &Path) -> PathBuf {
        let options: Map<_, _> = [
            (AnswerLetter::A, "one".to_string()),
            (AnswerLetter::B, "two".to_string()),
        ]
        .into_iter()
        .collect();
        let items: Vec<MCQItem> = (0..4)
            .map(|i| {
                MCQItem::new(
                    format!("q{i}"),
                    "CLIcK",
                    Some(if i % 2 == 0 { "History" } else { "Grammar" }.to_string()),
                    LanguageCode::Ko,
                    "질문",
                    options.clone(),
                    AnswerLetter::A,
                    None,
                )
                .unwrap()
            })
            .collect();
        let path = dir.join("click.jsonl");
        write_dataset(&path, &items).unwrap();
        path
    }

    #[test]
    fn manifest_loads_filters_and_asserts_counts() {
        let dir = tempfile::tempdir().unwrap();
        write_sample(dir.path());
        let manifest: DatasetManifest = toml::from_str(
            r#"
            [datasets.click]
            path = "click.jsonl"
            language = "KO"
            topics = ["History"]
            expected_count = 2
            "#,
        )
        .unwrap();
        let items = manifest.load_tag("click", dir.path()).unwrap();
        assert_eq!(items.len(), 2);
    }

    #[test]
    fn count_mismatch_is_surfaced() {
        let dir = tempfile::tempdir().unwrap();
        write_sample(dir.path());
        let manifest: DatasetManifest = toml::from_str(
            r#"
            [datasets.click]
            path = "click.jsonl"
            language = "KO"
            expected_count = 1345
            "#,
        )
        .unwrap();
        let err = manifest.load_tag("click", dir.path()).unwrap_err();
        assert!(matches!(
            err,
            ManifestError::Dataset {
                source: DatasetError::CountMismatch {
                    expected: 1345,
                    found: 4,
                    ..
                },
                ..
            }
        ));
    }

    #[test]
    fn unknown_tags_are_reported() {
        let manifest = DatasetManifest {
            datasets: BTreeMap::new(),
        };
        assert!(matches!(
            manifest.load_tag("nope", Path::new(".")).unwrap_err(),
            ManifestError::UnknownTag(_)
        ));
    }
}
