//! Deterministic response-language identification by script counting.
//!
//! Counts letter-category characters per script and picks the script
//! holding a strict majority. Unlike statistical detectors, the result is
//! stable across versions, so the input-language ratio is reproducible.

use serde::{Deserialize, Serialize};

use crate::types::{LanguageCode, Script};

/// Script classes counted by the histogram. `Other` collects letters of
/// any script outside the supported four.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptClass {
    Latin,
    Han,
    Hangul,
    Arabic,
    Other,
}

/// Letter counts per script class. Digits, punctuation, and whitespace are
/// never counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptHistogram {
    pub latin: usize,
    pub han: usize,
    pub hangul: usize,
    pub arabic: usize,
    pub other: usize,
}

/// Classify one character, or `None` when it is not a letter.
fn classify(c: char) -> Option<ScriptClass> {
    if !c.is_alphabetic() {
        return None;
    }
    let cp = c as u32;
    let class = match cp {
        // Latin: ASCII, Latin-1 letters, Latin Extended, full-width forms.
        0x0041..=0x005A
        | 0x0061..=0x007A
        | 0x00C0..=0x00FF
        | 0x0100..=0x024F
        | 0x1E00..=0x1EFF
        | 0xFF21..=0xFF3A
        | 0xFF41..=0xFF5A => ScriptClass::Latin,
        // Han: unified ideographs, extension A, compatibility ideographs,
        // and the supplementary planes.
        0x3400..=0x4DBF | 0x4E00..=0x9FFF | 0xF900..=0xFAFF | 0x20000..=0x2EBEF => ScriptClass::Han,
        // Hangul: syllables plus jamo blocks.
        0x1100..=0x11FF | 0x3130..=0x318F | 0xA960..=0xA97F | 0xAC00..=0xD7A3 | 0xD7B0..=0xD7FF => {
            ScriptClass::Hangul
        }
        // Arabic: main block and its extensions and presentation forms.
        0x0600..=0x06FF | 0x0750..=0x077F | 0x08A0..=0x08FF | 0xFB50..=0xFDFF | 0xFE70..=0xFEFF => {
            ScriptClass::Arabic
        }
        _ => ScriptClass::Other,
    };
    Some(class)
}

impl ScriptHistogram {
    pub fn of(text: &str) -> Self {
        let mut hist = ScriptHistogram::default();
        for c in text.chars() {
            match classify(c) {
                Some(ScriptClass::Latin) => hist.latin += 1,
                Some(ScriptClass::Han) => hist.han += 1,
                Some(ScriptClass::Hangul) => hist.hangul += 1,
                Some(ScriptClass::Arabic) => hist.arabic += 1,
                Some(ScriptClass::Other) => hist.other += 1,
                None => {}
            }
        }
        hist
    }

    /// Total letters counted.
    pub fn total(&self) -> usize {
        self.latin + self.han + self.hangul + self.arabic + self.other
    }

    pub fn count(&self, script: Script) -> usize {
        match script {
            Script::Latin => self.latin,
            Script::Han => self.han,
            Script::Hangul => self.hangul,
            Script::Arabic => self.arabic,
        }
    }
}

/// Identify the response language, or `None` when no script holds a strict
/// majority of the letters (including the zero-letter and exact-tie cases).
pub fn detect_language(text: &str) -> Option<LanguageCode> {
    let hist = ScriptHistogram::of(text);
    let total = hist.total();
    if total == 0 {
        return None;
    }
    let counts = [
        (hist.latin, Some(LanguageCode::En)),
        (hist.han, Some(LanguageCode::Zh)),
        (hist.hangul, Some(LanguageCode::Ko)),
        (hist.arabic, Some(LanguageCode::Ar)),
        (hist.other, None),
    ];
    let max = counts.iter().map(|(c, _)| *c).max().unwrap_or(0);
    if counts.iter().filter(|(c, _)| *c == max).count() > 1 {
        return None;
    }
    // Strict majority: 2 * count > total, kept in integers so ties and
    // exact halves are unambiguous.
    if 2 * max <= total {
        return None;
    }
    counts.iter().find(|(c, _)| *c == max).and_then(|(_, l)| *l)
}
