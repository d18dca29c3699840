//! Multiple-choice question items.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lang::LanguageCode;

/// One of the four allowed option letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AnswerLetter {
    A,
    B,
    C,
    D,
}

impl AnswerLetter {
    pub const ALL: [AnswerLetter; 4] = [
        AnswerLetter::A,
        AnswerLetter::B,
        AnswerLetter::C,
        AnswerLetter::D,
    ];

    pub fn as_char(self) -> char {
        match self {
            AnswerLetter::A => 'A',
            AnswerLetter::B => 'B',
            AnswerLetter::C => 'C',
            AnswerLetter::D => 'D',
        }
    }

    /// Parse an exact uppercase ASCII letter. Normalization of lowercase or
    /// full-width forms is the caller's concern.
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'A' => Some(AnswerLetter::A),
            'B' => Some(AnswerLetter::B),
            'C' => Some(AnswerLetter::C),
            'D' => Some(AnswerLetter::D),
            _ => None,
        }
    }

    fn index(self) -> usize {
        match self {
            AnswerLetter::A => 0,
            AnswerLetter::B => 1,
            AnswerLetter::C => 2,
            AnswerLetter::D => 3,
        }
    }
}

impl fmt::Display for AnswerLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Why an item was rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ItemError {
    #[error("item {id}: options must not be empty")]
    EmptyOptions { id: String },
    #[error("item {id}: option letters must be contiguous from A, missing {missing}")]
    NonContiguousOptions { id: String, missing: AnswerLetter },
    #[error("item {id}: gold answer {gold} is not among the options")]
    GoldNotAnOption { id: String, gold: AnswerLetter },
}

/// One multiple-choice question.
///
/// Constructed through [`MCQItem::new`], which enforces that options are
/// non-empty, letters run contiguously from A, and the gold letter is one
/// of the options.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCQItem {
    id: String,
    dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    topic: Option<String>,
    language: LanguageCode,
    question: String,
    options: BTreeMap<AnswerLetter, String>,
    answer: AnswerLetter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    paired_id: Option<String>,
}

impl MCQItem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: impl Into<String>,
        dataset: impl Into<String>,
        topic: Option<String>,
        language: LanguageCode,
        question: impl Into<String>,
        options: BTreeMap<AnswerLetter, String>,
        answer: AnswerLetter,
        paired_id: Option<String>,
    ) -> Result<Self, ItemError> {
        let item = MCQItem {
            id: id.into(),
            dataset: dataset.into(),
            topic,
            language,
            question: question.into(),
            options,
            answer,
            paired_id,
        };
        item.validate()?;
        Ok(item)
    }

    /// Re-check invariants, e.g. after deserializing.
    pub fn validate(&self) -> Result<(), ItemError> {
        if self.options.is_empty() {
            return Err(ItemError::EmptyOptions {
                id: self.id.clone(),
            });
        }
        for (i, letter) in AnswerLetter::ALL
            .iter()
            .take(self.options.len())
            .enumerate()
        {
            debug_assert_eq!(letter.index(), i);
            if !self.options.contains_key(letter) {
                return Err(ItemError::NonContiguousOptions {
                    id: self.id.clone(),
                    missing: *letter,
                });
            }
        }
        if !self.options.contains_key(&self.answer) {
            return Err(ItemError::GoldNotAnOption {
                id: self.id.clone(),
                gold: self.answer,
            });
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dataset(&self) -> &str {
        &self.dataset
    }

    pub fn topic(&self) -> Option<&str> {
        self.topic.as_deref()
    }

    pub fn language(&self) -> LanguageCode {
        self.language
    }

    pub fn question(&self) -> &str {
        &self.question
    }

    /// Options in letter order.
    pub fn options(&self) -> impl Iterator<Item = (AnswerLetter, &str)> {
        self.options.iter().map(|(l, t)| (*l, t.as_str()))
    }

    pub fn option_text(&self, letter: AnswerLetter) -> Option<&str> {
        self.options.get(&letter).map(String::as_str)
    }

    pub fn gold(&self) -> AnswerLetter {
        self.answer
    }

    pub fn paired_id(&self) -> Option<&str> {
        self.paired_id.as_deref()
    }

    /// A copy of this item with translated question and option texts, the
    /// same gold letter, and the pairing recorded in both directions.
    pub(crate) fn translated_copy(
        &self,
        new_id: String,
        language: LanguageCode,
        question: String,
        options: BTreeMap<AnswerLetter, String>,
    ) -> (MCQItem, MCQItem) {
        let translated = MCQItem {
            id: new_id.clone(),
            dataset: self.dataset.clone(),
            topic: self.topic.clone(),
            language,
            question,
            options,
            answer: self.answer,
            paired_id: Some(self.id.clone()),
        };
        let mut original = self.clone();
        original.paired_id = Some(new_id);
        (original, translated)
    }
}
