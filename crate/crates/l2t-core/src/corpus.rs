//! Continued-pretraining corpus construction.
//!
//! Four configurations over a file of monolingual factual statements:
//! verbatim, translated to English, or thought-prefixed in either
//! direction. One statement per line in, one training line per statement
//! out, order preserved.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::provider::{ProviderError, Translator};
use crate::types::LanguageCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusKind {
    /// Statements verbatim.
    OrigOnly,
    /// Each statement translated to English.
    TranslatedEn,
    /// Each statement carries the source-language thought prefix.
    L2TPrefixOrig,
    /// Each statement carries the English thought prefix.
    L2TPrefixEn,
}

impl CorpusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusKind::OrigOnly => "orig-only",
            CorpusKind::TranslatedEn => "translated-en",
            CorpusKind::L2TPrefixOrig => "l2t-prefix-orig",
            CorpusKind::L2TPrefixEn => "l2t-prefix-en",
        }
    }

    fn has_prefix(self) -> bool {
        matches!(self, CorpusKind::L2TPrefixOrig | CorpusKind::L2TPrefixEn)
    }
}

/// Where the prefix attaches. Prepending is the default; the alternative
/// is exposed because either reading of the construction is defensible.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefixPosition {
    #[default]
    Prepend,
    Append,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("statement list is empty")]
    EmptyInput,
    #[error("prefix kinds require a non-empty prefix")]
    MissingPrefix,
    #[error("{kind:?} carries no prefix")]
    UnexpectedPrefix { kind: CorpusKind },
    #[error("translation backend required for the translated configuration")]
    MissingTranslator,
    #[error("line {line}: {source}")]
    Translation { line: usize, source: ProviderError },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// English names used to build the default prefix sentences.
fn english_name(language: LanguageCode) -> &'static str {
    match language {
        LanguageCode::En => "English",
        LanguageCode::Zh => "Chinese",
        LanguageCode::Ko => "Korean",
        LanguageCode::Ar => "Arabic",
    }
}

/// One corpus configuration: the kind, the source language, and the
/// prefix the prefixed kinds carry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub kind: CorpusKind,
    pub source_language: LanguageCode,
    /// Prefix text for the prefixed kinds; `None` elsewhere.
    pub prefix: Option<String>,
    #[serde(default)]
    pub prefix_position: PrefixPosition,
}

impl CorpusConfig {
    /// A configuration with the default prefix for its kind. The default
    /// prefix is the English sentence naming the thought language, e.g.
    /// "Let's think in Korean." for a Korean source; operators may
    /// override it, including with a source-language phrasing.
    pub fn new(kind: CorpusKind, source_language: LanguageCode) -> Self {
        let prefix = match kind {
            CorpusKind::L2TPrefixOrig => {
                Some(format!("Let's think in {}.", english_name(source_language)))
            }
            CorpusKind::L2TPrefixEn => Some("Let's think in English.".to_string()),
            _ => None,
        };
        CorpusConfig {
            kind,
            source_language,
            prefix,
            prefix_position: PrefixPosition::Prepend,
        }
    }

    pub fn with_prefix(mut self, prefix: impl Into<String>) -> Self {
        self.prefix = Some(prefix.into());
        self
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.kind.has_prefix() {
            if !self.prefix.as_ref().is_some_and(|p| !p.is_empty()) {
                return Err(CorpusError::MissingPrefix);
            }
        } else if self.prefix.is_some() {
            return Err(CorpusError::UnexpectedPrefix { kind: self.kind });
        }
        Ok(())
    }
}

/// Build the training lines for one configuration.
///
/// Prefixed kinds join the prefix and the statement with a single space;
/// stripping the prefix and separator recovers the verbatim corpus
/// exactly. Output count and order always match the input.
pub fn build_corpus(
    statements: &[String],
    config: &CorpusConfig,
    translator: Option<&dyn Translator>,
) -> Result<Vec<String>, CorpusError> {
    if statements.is_empty() {
        return Err(CorpusError::EmptyInput);
    }
    config.validate()?;
    match config.kind {
        CorpusKind::OrigOnly => Ok(statements.to_vec()),
        CorpusKind::TranslatedEn => {
            let translator = translator.ok_or(CorpusError::MissingTranslator)?;
            statements
                .iter()
                .enumerate()
                .map(|(i, line)| {
                    translator
                        .translate(line, config.source_language, LanguageCode::En)
                        .map_err(|source| CorpusError::Translation {
                            line: i + 1,
                            source,
                        })
                })
                .collect()
        }
        CorpusKind::L2TPrefixOrig | CorpusKind::L2TPrefixEn => {
            let prefix = config.prefix.as_deref().expect("validated");
            Ok(statements
                .iter()
                .map(|line| match config.prefix_position {
                    PrefixPosition::Prepend => format!("{prefix} {line}"),
                    PrefixPosition::Append => format!("{line} {prefix}"),
                })
                .collect())
        }
    }
}

/// Remove the configured prefix from every line, recovering the verbatim
/// corpus. Lines that do not carry the prefix come back unchanged.
pub fn strip_prefix(lines: &[String], config: &CorpusConfig) -> Vec<String> {
    let Some(prefix) = config.prefix.as_deref() else {
        return lines.to_vec();
    };
    lines
        .iter()
        .map(|line| {
            let recovered = match config.prefix_position {
                PrefixPosition::Prepend => line
                    .strip_prefix(prefix)
                    .and_then(|rest| rest.strip_prefix(' ')),
                PrefixPosition::Append => line
                    .strip_suffix(prefix)
                    .and_then(|rest| rest.strip_suffix(' ')),
            };
            recovered.unwrap_or(line).to_string()
        })
        .collect()
}

/// Sidecar manifest describing one emitted corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub kind: CorpusKind,
    pub source_language: LanguageCode,
    pub count: usize,
    pub prefix: Option<String>,
    /// SHA-256 of the emitted file bytes.
    pub sha256: String,
}

/// Write the corpus plus its `<path>.manifest.json` sidecar.
pub fn write_corpus(
    path: &Path,
    lines: &[String],
    config: &CorpusConfig,
) -> Result<CorpusManifest, CorpusError> {
    let display = path.display().to_string();
    let mut buffer = String::new();
    for line in lines {
        buffer.push_str(line);
        buffer.push('\n');
    }
    std::fs::write(path, &buffer).map_err(|source| CorpusError::Io {
        path: display.clone(),
        source,
    })?;
    let manifest = CorpusManifest {
        kind: config.kind,
        source_language: config.source_language,
        count: lines.len(),
        prefix: config.prefix.clone(),
        sha256: format!("{:x}", Sha256::digest(buffer.as_bytes())),
    };
    let manifest_path = path.with_extension(format!(
        "{}manifest.json",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    let mut file = std::fs::File::create(&manifest_path).map_err(|source| CorpusError::Io {
        path: manifest_path.display().to_string(),
        source,
    })?;
    file.write_all(
        serde_json::to_string_pretty(&manifest)
            .expect("serializes")
            .as_bytes(),
    )
    .map_err(|source| CorpusError::Io {
        path: manifest_path.display().to_string(),
        source,
    })?;
    Ok(manifest)
}

/// Read one statement per line.
pub fn read_statements(path: &Path) -> Result<Vec<String>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text.lines().map(str::to_string).collect())
}
