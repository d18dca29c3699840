//! Per-language answer-marker phrases.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::types::LanguageCode;

/// The phrase each instruction asks the model to finish with, per language.
const BUILTIN_MARKERS: [(LanguageCode, &str); 4] = [
    (LanguageCode::En, "Therefore, the answer is"),
    (LanguageCode::Zh, "因此，答案是"),
    (LanguageCode::Ko, "따라서 답은"),
    (LanguageCode::Ar, "إذن، الإجابة هي"),
];

#[derive(Debug, Error)]
pub enum MarkerError {
    #[error("missing marker file for {language}: {path}")]
    MissingFile {
        language: LanguageCode,
        path: String,
    },
    #[error("marker for {language} is empty")]
    EmptyMarker { language: LanguageCode },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Marker phrases for every supported language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerTable {
    markers: BTreeMap<LanguageCode, String>,
}

impl Default for MarkerTable {
    fn default() -> Self {
        MarkerTable {
            markers: BUILTIN_MARKERS
                .iter()
                .map(|(l, m)| (*l, m.to_string()))
                .collect(),
        }
    }
}

impl MarkerTable {
    /// Load operator-editable markers from `<dir>/<lang>/marker.txt`.
    /// Every language must have a non-empty entry.
    pub fn load(dir: &Path) -> Result<Self, MarkerError> {
        let mut markers = BTreeMap::new();
        for lang in LanguageCode::ALL {
            let path = dir.join(lang.dir_name()).join("marker.txt");
            if !path.exists() {
                return Err(MarkerError::MissingFile {
                    language: lang,
                    path: path.display().to_string(),
                });
            }
            let raw = std::fs::read_to_string(&path).map_err(|source| MarkerError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let marker = raw.trim_end_matches(['\n', '\r']).to_string();
            if marker.is_empty() {
                return Err(MarkerError::EmptyMarker { language: lang });
            }
            markers.insert(lang, marker);
        }
        Ok(MarkerTable { markers })
    }

    pub fn get(&self, lang: LanguageCode) -> &str {
        &self.markers[&lang]
    }

    pub fn iter(&self) -> impl Iterator<Item = (LanguageCode, &str)> {
        self.markers.iter().map(|(l, m)| (*l, m.as_str()))
    }
}
