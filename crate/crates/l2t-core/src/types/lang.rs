//! Supported languages and their scripts.

use std::fmt;

use serde::{Deserialize, Serialize};

/// The closed set of languages the harness evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LanguageCode {
    #[serde(rename = "EN")]
    En,
    #[serde(rename = "ZH")]
    Zh,
    #[serde(rename = "KO")]
    Ko,
    #[serde(rename = "AR")]
    Ar,
}

/// Writing system of a supported language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Script {
    Latin,
    Han,
    Hangul,
    Arabic,
}

impl LanguageCode {
    /// All supported languages, in a fixed order.
    pub const ALL: [LanguageCode; 4] = [
        LanguageCode::En,
        LanguageCode::Zh,
        LanguageCode::Ko,
        LanguageCode::Ar,
    ];

    /// The script this language is written in. The mapping is fixed.
    pub fn script(self) -> Script {
        match self {
            LanguageCode::En => Script::Latin,
            LanguageCode::Zh => Script::Han,
            LanguageCode::Ko => Script::Hangul,
            LanguageCode::Ar => Script::Arabic,
        }
    }

    /// Two-letter uppercase code, as used in config files and reports.
    pub fn as_str(self) -> &'static str {
        match self {
            LanguageCode::En => "EN",
            LanguageCode::Zh => "ZH",
            LanguageCode::Ko => "KO",
            LanguageCode::Ar => "AR",
        }
    }

    /// Lowercase code used for directory names.
    pub fn dir_name(self) -> &'static str {
        match self {
            LanguageCode::En => "en",
            LanguageCode::Zh => "zh",
            LanguageCode::Ko => "ko",
            LanguageCode::Ar => "ar",
        }
    }

    /// Parse a code, case-insensitively. Returns `None` for anything
    /// outside the supported set.
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EN" => Some(LanguageCode::En),
            "ZH" => Some(LanguageCode::Zh),
            "KO" => Some(LanguageCode::Ko),
            "AR" => Some(LanguageCode::Ar),
            _ => None,
        }
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Script {
    /// The language this script maps back to in detection.
    pub fn language(self) -> LanguageCode {
        match self {
            Script::Latin => LanguageCode::En,
            Script::Han => LanguageCode::Zh,
            Script::Hangul => LanguageCode::Ko,
            Script::Arabic => LanguageCode::Ar,
        }
    }
}
