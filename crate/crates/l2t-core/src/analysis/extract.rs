//! Option-letter extraction from free-form responses.

use serde::{Deserialize, Serialize};

use super::markers::MarkerTable;
use crate::types::{AnswerLetter, LanguageCode};

/// How the letter was (or was not) found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractionMethod {
    /// First standalone letter after the last marker phrase.
    Marker,
    /// No marker anywhere; last standalone letter in the response.
    FallbackLastLetter,
    Failed,
}

/// Result of scanning one response.
///
/// `letter` is absent exactly when `method` is `Failed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub letter: Option<AnswerLetter>,
    pub method: ExtractionMethod,
    /// Language of the marker that matched, when one did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker_language: Option<LanguageCode>,
    /// More than one distinct candidate letter followed the final marker;
    /// the first was taken but the transcript deserves a manual look.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ambiguous: bool,
}

impl ExtractionResult {
    fn failed() -> Self {
        ExtractionResult {
            letter: None,
            method: ExtractionMethod::Failed,
            marker_language: None,
            ambiguous: false,
        }
    }
}

/// Map a character to the option letter it denotes, folding case and
/// full-width forms.
fn normalize_letter(c: char) -> Option<AnswerLetter> {
    let ascii = match c {
        'A'..='D' => c,
        'a'..='d' => c.to_ascii_uppercase(),
        // Full-width Latin block: Ａ..Ｄ and ａ..ｄ.
        '\u{FF21}'..='\u{FF24}' => char::from(b'A' + (c as u32 - 0xFF21) as u8),
        '\u{FF41}'..='\u{FF44}' => char::from(b'A' + (c as u32 - 0xFF41) as u8),
        _ => return None,
    };
    AnswerLetter::from_char(ascii)
}

/// A character that would make an adjacent option letter part of a word.
///
/// Only Latin letters disqualify: the A in "Answer" is not standalone,
/// but a particle attached in another script, as in the Korean "B이다",
/// leaves the letter extractable.
fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || (matches!(c as u32, 0x00C0..=0x024F | 0x1E00..=0x1EFF) && c.is_alphabetic())
        || matches!(c as u32, 0xFF21..=0xFF3A | 0xFF41..=0xFF5A)
}

/// All standalone option letters in `text`, in order of appearance.
fn standalone_letters(text: &str) -> Vec<AnswerLetter> {
    let chars: Vec<char> = text.chars().collect();
    let mut found = Vec::new();
    for (i, &c) in chars.iter().enumerate() {
        let Some(letter) = normalize_letter(c) else {
            continue;
        };
        let prev_ok = i == 0 || !is_latin_letter(chars[i - 1]);
        let next_ok = i + 1 == chars.len() || !is_latin_letter(chars[i + 1]);
        if prev_ok && next_ok {
            found.push(letter);
        }
    }
    found
}

/// Byte offset just past the last occurrence of any marker phrase, with
/// the language whose marker matched there.
fn last_marker_end(response: &str, markers: &MarkerTable) -> Option<(usize, LanguageCode)> {
    let mut best: Option<(usize, usize, LanguageCode)> = None;
    for (lang, phrase) in markers.iter() {
        if let Some(start) = response.rfind(phrase) {
            let replace = match best {
                None => true,
                Some((s, _, _)) => start > s,
            };
            if replace {
                best = Some((start, start + phrase.len(), lang));
            }
        }
    }
    best.map(|(_, end, lang)| (end, lang))
}

/// Extract the chosen option letter from a response.
///
/// Markers of every language are searched, because models routinely reason
/// in one language and close with another language's marker sentence. The
/// last marker occurrence wins; the first standalone letter after it is
/// the answer. Without any marker, the last standalone letter in the whole
/// response is used. Failure is a value, not an error.
pub fn extract_answer(response: &str, markers: &MarkerTable) -> ExtractionResult {
    if let Some((end, lang)) = last_marker_end(response, markers) {
        let after = standalone_letters(&response[end..]);
        return match after.first() {
            Some(&letter) => ExtractionResult {
                letter: Some(letter),
                method: ExtractionMethod::Marker,
                marker_language: Some(lang),
                ambiguous: after.iter().any(|&l| l != letter),
            },
            // A marker with no letter after it (e.g. truncated output)
            // still suppresses the fallback.
            None => ExtractionResult::failed(),
        };
    }
    match standalone_letters(response).last() {
        Some(&letter) => ExtractionResult {
            letter: Some(letter),
            method: ExtractionMethod::FallbackLastLetter,
            marker_language: None,
            ambiguous: false,
        },
        None => ExtractionResult::failed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn extract(response: &str) -> ExtractionResult {
        extract_answer(response, &MarkerTable::default())
    }

    #[test]
    fn marker_path_takes_first_letter_after_marker() {
        let r = extract("Considering the proximity of Gyeonggi-do. Therefore, the answer is A.");
        assert_eq!(r.letter, Some(AnswerLetter::A));
        assert_eq!(r.method, ExtractionMethod::Marker);
        assert_eq!(r.marker_language, Some(LanguageCode::En));
        assert!(!r.ambiguous);
    }

    #[test]
    fn english_marker_after_chinese_reasoning() {
        let r = extract("白肉血肠是满族特色菜，符合题意。 Therefore, the answer is D.");
        assert_eq!(r.letter, Some(AnswerLetter::D));
        assert_eq!(r.marker_language, Some(LanguageCode::En));
    }

    #[test]
    fn korean_marker_matches() {
        let r = extract("경복궁은 서울에 있다. 따라서 답은 B이다.");
        assert_eq!(r.letter, Some(AnswerLetter::B));
        assert_eq!(r.method, ExtractionMethod::Marker);
        assert_eq!(r.marker_language, Some(LanguageCode::Ko));
    }

    #[test]
    fn hangul_particles_do_not_hide_the_letter() {
        let r = extract("정답은 분명하다. 따라서 답은 A입니다.");
        assert_eq!(r.letter, Some(AnswerLetter::A));
    }

    #[test]
    fn no_letter_at_all_fails() {
        let r = extract("I am not sure.");
        assert_eq!(r.letter, None);
        assert_eq!(r.method, ExtractionMethod::Failed);
    }

    #[test]
    fn fallback_takes_last_standalone_letter() {
        let r = extract("Options B and C are wrong. The best choice: A");
        assert_eq!(r.letter, Some(AnswerLetter::A));
        assert_eq!(r.method, ExtractionMethod::FallbackLastLetter);
    }

    #[test]
    fn last_marker_wins_over_earlier_ones() {
        let r =
            extract("Therefore, the answer is B. Wait, reconsidering. Therefore, the answer is C.");
        assert_eq!(r.letter, Some(AnswerLetter::C));
        assert!(!r.ambiguous);
    }

    #[test]
    fn two_letters_after_final_marker_flag_audit() {
        let r = extract("Therefore, the answer is B or C.");
        assert_eq!(r.letter, Some(AnswerLetter::B));
        assert!(r.ambiguous);
    }

    #[test]
    fn repeated_letter_after_marker_is_not_ambiguous() {
        let r = extract("Therefore, the answer is D. D is correct.");
        assert_eq!(r.letter, Some(AnswerLetter::D));
        assert!(!r.ambiguous);
    }

    #[test]
    fn marker_without_letter_suppresses_fallback() {
        let r = extract("Option B looks right. Therefore, the answer is");
        assert_eq!(r.letter, None);
        assert_eq!(r.method, ExtractionMethod::Failed);
    }

    #[test]
    fn full_width_and_lowercase_letters_normalize() {
        let r = extract("因此，答案是Ｄ。");
        assert_eq!(r.letter, Some(AnswerLetter::D));
        let r = extract("Therefore, the answer is (c).");
        assert_eq!(r.letter, Some(AnswerLetter::C));
    }

    #[test]
    fn letters_inside_words_do_not_count() {
        let r = extract("Certainly a balanced detail");
        assert_eq!(
            r.letter,
            Some(AnswerLetter::A),
            "only the article is standalone"
        );
        let r = extract("Broadly considered");
        assert_eq!(r.method, ExtractionMethod::Failed);
    }
}
