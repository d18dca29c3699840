//! Loading and validating the operator-editable template directory.
//!
//! Layout: one file per (language, kind) at `<lang>/<kind>.txt`, UTF-8
//! without BOM, with the trailing newline stripped on load. Each language
//! directory also carries `names.txt` (language names written in that
//! language) and `personas.txt` (speaker descriptors), both `CODE=value`
//! line files, plus the `marker.txt` consumed by response analysis.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::types::LanguageCode;

pub const THOUGHT_SLOT: &str = "{thought}";
pub const OUTPUT_SLOT: &str = "{output}";
pub const PERSONA_SLOT: &str = "{persona}";

/// Which template cell an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Instruction,
    Consistent,
    Transfer,
    Align,
    Persona(u8),
    Names,
    Personas,
}

impl TemplateKind {
    fn file_name(self) -> String {
        match self {
            TemplateKind::Instruction => "instruction.txt".into(),
            TemplateKind::Consistent => "consistent.txt".into(),
            TemplateKind::Transfer => "transfer.txt".into(),
            TemplateKind::Align => "align.txt".into(),
            TemplateKind::Persona(v) => format!("persona_{v}.txt"),
            TemplateKind::Names => "names.txt".into(),
            TemplateKind::Personas => "personas.txt".into(),
        }
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateKind::Persona(v) => write!(f, "persona variant {v}"),
            other => {
                let name = match other {
                    TemplateKind::Instruction => "instruction",
                    TemplateKind::Consistent => "consistent",
                    TemplateKind::Transfer => "transfer",
                    TemplateKind::Align => "align",
                    TemplateKind::Names => "names",
                    TemplateKind::Personas => "personas",
                    TemplateKind::Persona(_) => unreachable!(),
                };
                f.write_str(name)
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("missing template {kind} for {language}: {path}")]
    MissingTemplate {
        language: LanguageCode,
        kind: TemplateKind,
        path: String,
    },
    #[error("template {kind} for {language} is empty")]
    EmptyTemplate {
        language: LanguageCode,
        kind: TemplateKind,
    },
    #[error("template {kind} for {language} must contain the {placeholder} slot")]
    MissingPlaceholder {
        language: LanguageCode,
        kind: TemplateKind,
        placeholder: &'static str,
    },
    #[error("template {kind} for {language} must not contain the {placeholder} slot")]
    UnexpectedPlaceholder {
        language: LanguageCode,
        kind: TemplateKind,
        placeholder: &'static str,
    },
    #[error("{kind} table for {language} is missing an entry for {code}")]
    MissingEntry {
        language: LanguageCode,
        kind: TemplateKind,
        code: LanguageCode,
    },
    #[error("{path} line {line}: expected CODE=value")]
    BadTableLine { path: String, line: usize },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// All templates for one input language.
#[derive(Debug, Clone)]
pub(crate) struct LanguageTemplates {
    pub instruction: String,
    pub consistent: String,
    pub transfer: String,
    pub align: String,
    pub personas: [String; 3],
    /// Language names written in this language, e.g. the ZH table maps
    /// EN to 英语.
    pub names: BTreeMap<LanguageCode, String>,
    /// Speaker descriptors written in this language.
    pub persona_descriptors: BTreeMap<LanguageCode, String>,
}

/// The complete, validated template matrix for all supported languages.
///
/// Loaded once and shared; every cell is checked for presence, emptiness,
/// and the placeholder slots its kind requires before any prompt is built.
#[derive(Debug, Clone)]
pub struct PromptTemplateSet {
    root: PathBuf,
    per_lang: BTreeMap<LanguageCode, LanguageTemplates>,
}

fn read_template(
    dir: &Path,
    language: LanguageCode,
    kind: TemplateKind,
) -> Result<String, TemplateError> {
    let path = dir.join(kind.file_name());
    if !path.exists() {
        return Err(TemplateError::MissingTemplate {
            language,
            kind,
            path: path.display().to_string(),
        });
    }
    let raw = std::fs::read_to_string(&path).map_err(|source| TemplateError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = raw.trim_end_matches(['\n', '\r']).to_string();
    if text.is_empty() {
        return Err(TemplateError::EmptyTemplate { language, kind });
    }
    Ok(text)
}

fn read_table(
    dir: &Path,
    language: LanguageCode,
    kind: TemplateKind,
) -> Result<BTreeMap<LanguageCode, String>, TemplateError> {
    let path = dir.join(kind.file_name());
    if !path.exists() {
        return Err(TemplateError::MissingTemplate {
            language,
            kind,
            path: path.display().to_string(),
        });
    }
    let raw = std::fs::read_to_string(&path).map_err(|source| TemplateError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut table = BTreeMap::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (code, value) = line
            .split_once('=')
            .ok_or_else(|| TemplateError::BadTableLine {
                path: path.display().to_string(),
                line: i + 1,
            })?;
        let code = LanguageCode::parse(code.trim()).ok_or_else(|| TemplateError::BadTableLine {
            path: path.display().to_string(),
            line: i + 1,
        })?;
        table.insert(code, value.trim().to_string());
    }
    for code in LanguageCode::ALL {
        if !table.get(&code).is_some_and(|v| !v.is_empty()) {
            return Err(TemplateError::MissingEntry {
                language,
                kind,
                code,
            });
        }
    }
    Ok(table)
}

fn require_slot(
    text: &str,
    language: LanguageCode,
    kind: TemplateKind,
    placeholder: &'static str,
) -> Result<(), TemplateError> {
    if text.contains(placeholder) {
        Ok(())
    } else {
        Err(TemplateError::MissingPlaceholder {
            language,
            kind,
            placeholder,
        })
    }
}

fn forbid_slot(
    text: &str,
    language: LanguageCode,
    kind: TemplateKind,
    placeholder: &'static str,
) -> Result<(), TemplateError> {
    if text.contains(placeholder) {
        Err(TemplateError::UnexpectedPlaceholder {
            language,
            kind,
            placeholder,
        })
    } else {
        Ok(())
    }
}

impl PromptTemplateSet {
    /// Load and validate every cell of the template matrix under `root`.
    pub fn load(root: impl Into<PathBuf>) -> Result<Self, TemplateError> {
        let root = root.into();
        let mut per_lang = BTreeMap::new();
        for language in LanguageCode::ALL {
            let dir = root.join(language.dir_name());

            let instruction = read_template(&dir, language, TemplateKind::Instruction)?;

            let consistent = read_template(&dir, language, TemplateKind::Consistent)?;
            require_slot(
                &consistent,
                language,
                TemplateKind::Consistent,
                THOUGHT_SLOT,
            )?;
            forbid_slot(&consistent, language, TemplateKind::Consistent, OUTPUT_SLOT)?;

            let transfer = read_template(&dir, language, TemplateKind::Transfer)?;
            require_slot(&transfer, language, TemplateKind::Transfer, THOUGHT_SLOT)?;
            forbid_slot(&transfer, language, TemplateKind::Transfer, OUTPUT_SLOT)?;

            // The align phrase mentions two languages, the others one.
            let align = read_template(&dir, language, TemplateKind::Align)?;
            require_slot(&align, language, TemplateKind::Align, THOUGHT_SLOT)?;
            require_slot(&align, language, TemplateKind::Align, OUTPUT_SLOT)?;

            let mut personas: [String; 3] = Default::default();
            for v in 0..3u8 {
                let text = read_template(&dir, language, TemplateKind::Persona(v))?;
                require_slot(&text, language, TemplateKind::Persona(v), PERSONA_SLOT)?;
                personas[v as usize] = text;
            }

            let names = read_table(&dir, language, TemplateKind::Names)?;
            let persona_descriptors = read_table(&dir, language, TemplateKind::Personas)?;

            per_lang.insert(
                language,
                LanguageTemplates {
                    instruction,
                    consistent,
                    transfer,
                    align,
                    personas,
                    names,
                    persona_descriptors,
                },
            );
        }
        Ok(PromptTemplateSet { root, per_lang })
    }

    /// Directory the set was loaded from.
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub(crate) fn for_language(&self, language: LanguageCode) -> &LanguageTemplates {
        &self.per_lang[&language]
    }

    /// The localized name of `of` as written in `in_lang`.
    pub fn language_name(&self, in_lang: LanguageCode, of: LanguageCode) -> &str {
        &self.per_lang[&in_lang].names[&of]
    }

    /// The localized speaker descriptor for `of` as written in `in_lang`.
    pub fn persona_descriptor(&self, in_lang: LanguageCode, of: LanguageCode) -> &str {
        &self.per_lang[&in_lang].persona_descriptors[&of]
    }
}
