//! Prompt configurations: which languages fill the input, thought, and
//! output slots of a run.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lang::LanguageCode;

/// The prompt-configuration families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SettingKind {
    /// Question only, no thought instruction.
    Baseline,
    /// Think in the input language.
    Consistent,
    /// Think in a language different from the input.
    Transfer,
    /// Think in a different language, answer in the input language.
    Align,
    /// Speaker persona matching the input language.
    PersonaConsistent,
    /// Speaker persona differing from the input language.
    PersonaTransfer,
}

impl SettingKind {
    pub fn is_persona(self) -> bool {
        matches!(
            self,
            SettingKind::PersonaConsistent | SettingKind::PersonaTransfer
        )
    }

    /// Stable name used in config files and report rows.
    pub fn as_str(self) -> &'static str {
        match self {
            SettingKind::Baseline => "baseline",
            SettingKind::Consistent => "consistent",
            SettingKind::Transfer => "transfer",
            SettingKind::Align => "align",
            SettingKind::PersonaConsistent => "persona-consistent",
            SettingKind::PersonaTransfer => "persona-transfer",
        }
    }
}

impl fmt::Display for SettingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One prompt configuration: the kind plus its language slots.
///
/// The slot shape is constrained per kind; `validate` checks the rules and
/// the smart constructors build only valid values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct L2TSetting {
    pub kind: SettingKind,
    pub input_lang: LanguageCode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thought_lang: Option<LanguageCode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_lang: Option<LanguageCode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona_variant: Option<u8>,
}

/// A slot-shape rule violation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid setting: {0}")]
pub struct InvalidSetting(pub String);

impl L2TSetting {
    pub fn baseline(input_lang: LanguageCode) -> Self {
        L2TSetting {
            kind: SettingKind::Baseline,
            input_lang,
            thought_lang: None,
            output_lang: None,
            persona_variant: None,
        }
    }

    pub fn consistent(input_lang: LanguageCode) -> Self {
        L2TSetting {
            kind: SettingKind::Consistent,
            input_lang,
            thought_lang: Some(input_lang),
            output_lang: None,
            persona_variant: None,
        }
    }

    pub fn transfer(
        input_lang: LanguageCode,
        thought_lang: LanguageCode,
    ) -> Result<Self, InvalidSetting> {
        let setting = L2TSetting {
            kind: SettingKind::Transfer,
            input_lang,
            thought_lang: Some(thought_lang),
            output_lang: None,
            persona_variant: None,
        };
        setting.validate()?;
        Ok(setting)
    }

    pub fn align(
        input_lang: LanguageCode,
        thought_lang: LanguageCode,
    ) -> Result<Self, InvalidSetting> {
        let setting = L2TSetting {
            kind: SettingKind::Align,
            input_lang,
            thought_lang: Some(thought_lang),
            output_lang: Some(input_lang),
            persona_variant: None,
        };
        setting.validate()?;
        Ok(setting)
    }

    pub fn persona_consistent(
        input_lang: LanguageCode,
        variant: u8,
    ) -> Result<Self, InvalidSetting> {
        let setting = L2TSetting {
            kind: SettingKind::PersonaConsistent,
            input_lang,
            thought_lang: Some(input_lang),
            output_lang: None,
            persona_variant: Some(variant),
        };
        setting.validate()?;
        Ok(setting)
    }

    pub fn persona_transfer(
        input_lang: LanguageCode,
        thought_lang: LanguageCode,
        variant: u8,
    ) -> Result<Self, InvalidSetting> {
        let setting = L2TSetting {
            kind: SettingKind::PersonaTransfer,
            input_lang,
            thought_lang: Some(thought_lang),
            output_lang: None,
            persona_variant: Some(variant),
        };
        setting.validate()?;
        Ok(setting)
    }

    /// Check every slot-shape rule for this setting's kind.
    pub fn validate(&self) -> Result<(), InvalidSetting> {
        if self.kind.is_persona() {
            match self.persona_variant {
                None => {
                    return Err(InvalidSetting(
                        "persona kinds require a persona variant".into(),
                    ))
                }
                Some(v) if v > 2 => {
                    return Err(InvalidSetting(format!(
                        "persona variant must be 0, 1, or 2, got {v}"
                    )))
                }
                Some(_) => {}
            }
        } else if self.persona_variant.is_some() {
            return Err(InvalidSetting(
                "persona variant is only valid for persona kinds".into(),
            ));
        }

        match self.kind {
            SettingKind::Baseline => {
                if self.thought_lang.is_some() {
                    return Err(InvalidSetting("baseline has no thought slot".into()));
                }
                if self.output_lang.is_some() {
                    return Err(InvalidSetting("baseline has no output slot".into()));
                }
            }
            SettingKind::Consistent | SettingKind::PersonaConsistent => {
                if self.thought_lang != Some(self.input_lang) {
                    return Err(InvalidSetting(
                        "consistent thought must equal the input language".into(),
                    ));
                }
                if self.output_lang.is_some() {
                    return Err(InvalidSetting("consistent has no output slot".into()));
                }
            }
            SettingKind::Transfer | SettingKind::PersonaTransfer => {
                match self.thought_lang {
                    None => return Err(InvalidSetting("transfer requires a thought slot".into())),
                    Some(t) if t == self.input_lang => {
                        return Err(InvalidSetting("thought must differ".into()))
                    }
                    Some(_) => {}
                }
                if self.output_lang.is_some() {
                    return Err(InvalidSetting("transfer has no output slot".into()));
                }
            }
            SettingKind::Align => {
                match self.thought_lang {
                    None => return Err(InvalidSetting("align requires a thought slot".into())),
                    Some(t) if t == self.input_lang => {
                        return Err(InvalidSetting("thought must differ".into()))
                    }
                    Some(_) => {}
                }
                if self.output_lang != Some(self.input_lang) {
                    return Err(InvalidSetting(
                        "align output must equal the input language".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Compact label like `align I:EN-T:KO-O:EN`, used for report rows and
    /// cell identifiers. Distinct settings have distinct labels.
    pub fn label(&self) -> String {
        let mut slots = format!("I:{}", self.input_lang);
        if let Some(t) = self.thought_lang {
            slots.push_str(&format!("-T:{t}"));
        }
        if let Some(o) = self.output_lang {
            slots.push_str(&format!("-O:{o}"));
        }
        match self.persona_variant {
            Some(v) => format!("{} v{v} {slots}", self.kind),
            None => format!("{} {slots}", self.kind),
        }
    }
}

/// Validate a setting, returning the first violated rule.
pub fn validate_setting(setting: &L2TSetting) -> Result<(), InvalidSetting> {
    setting.validate()
}
