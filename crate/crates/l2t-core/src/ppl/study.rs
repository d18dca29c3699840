//! Mean perplexity per (partition side, setting) over filtered questions.

use serde::{Deserialize, Serialize};

use super::{compute_ppl, PplError, PplRecord};
use crate::metrics::ConsistencyPartition;
use crate::prompt::{build_prompt_pair, PromptTemplateSet};
use crate::provider::{LogprobProvider, ProviderError};
use crate::types::{L2TSetting, MCQItem};
use crate::util::ordered_sum;

/// Which half of the consistency partition a group belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionSide {
    EnCorrectOrigWrong,
    EnWrongOrigCorrect,
}

impl PartitionSide {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionSide::EnCorrectOrigWrong => "en-correct-orig-wrong",
            PartitionSide::EnWrongOrigCorrect => "en-wrong-orig-correct",
        }
    }
}

/// Mean perplexity of one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PplStudyRow {
    pub side: PartitionSide,
    pub setting: L2TSetting,
    pub n_items: usize,
    /// Arithmetic mean of per-item perplexities; absent for empty groups.
    pub mean_ppl: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PplStudyTable {
    pub rows: Vec<PplStudyRow>,
    pub records: Vec<PplRecord>,
    /// Items whose trace could not be obtained and were dropped.
    pub dropped: usize,
}

/// Run the perplexity comparison over the consistency-filtered questions.
///
/// `pairs` holds (original-language item, English item) per question; the
/// partition is keyed by the original item's id. For each side and each
/// setting, the variant matching the setting's input language is prompted
/// with that setting's system prompt as context, and perplexity is
/// computed over the user-prompt window only. Per-item provider failures
/// drop the item from its group with a logged count; a missing logprob
/// capability aborts the study.
pub fn ppl_study(
    pairs: &[(MCQItem, MCQItem)],
    partition: &ConsistencyPartition,
    settings: &[L2TSetting],
    provider: &dyn LogprobProvider,
    templates: &PromptTemplateSet,
) -> Result<PplStudyTable, PplError> {
    let sides = [
        (
            PartitionSide::EnCorrectOrigWrong,
            &partition.en_correct_orig_wrong,
        ),
        (
            PartitionSide::EnWrongOrigCorrect,
            &partition.en_wrong_orig_correct,
        ),
    ];
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut dropped = 0usize;

    for (side, ids) in sides {
        for setting in settings {
            let mut ppls = Vec::new();
            for id in ids.iter() {
                let pair = pairs
                    .iter()
                    .find(|(orig, _)| orig.id() == id.as_str())
                    .ok_or_else(|| PplError::MissingVariant {
                        item_id: id.clone(),
                        language: setting.input_lang.to_string(),
                    })?;
                let item = if pair.0.language() == setting.input_lang {
                    &pair.0
                } else if pair.1.language() == setting.input_lang {
                    &pair.1
                } else {
                    return Err(PplError::MissingVariant {
                        item_id: id.clone(),
                        language: setting.input_lang.to_string(),
                    });
                };
                let prompts = build_prompt_pair(item, setting, templates)
                    .map_err(|err| PplError::Prompt(err.to_string()))?;
                let trace =
                    match provider.echo_logprobs(&prompts.system_prompt, &prompts.user_prompt) {
                        Ok(trace) => trace,
                        Err(err @ ProviderError::CapabilityUnsupported(_)) => {
                            return Err(PplError::Provider(err))
                        }
                        Err(err) => {
                            log::warn!("dropping {id} under {}: {err}", setting.label());
                            dropped += 1;
                            continue;
                        }
                    };
                let ppl = compute_ppl(&trace)?;
                records.push(PplRecord {
                    item_id: item.id().to_string(),
                    setting: *setting,
                    ppl,
                    window: (trace.k(), trace.m()),
                });
                ppls.push(ppl);
            }
            let n_items = ppls.len();
            let mean_ppl = if n_items == 0 {
                None
            } else {
                Some(ordered_sum(ppls) / n_items as f64)
            };
            rows.push(PplStudyRow {
                side,
                setting: *setting,
                n_items,
                mean_ppl,
            });
        }
    }
    Ok(PplStudyTable {
        rows,
        records,
        dropped,
    })
}

fn format_ppl(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.4}")).unwrap_or_default()
}

/// One CSV row per (partition side, setting) group.
pub fn ppl_csv(table: &PplStudyTable) -> String {
    let mut out = String::from("partition_side,setting,n_items,mean_ppl\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.side.as_str(),
            row.setting.label(),
            row.n_items,
            format_ppl(row.mean_ppl),
        ));
    }
    out
}

pub fn ppl_markdown(table: &PplStudyTable) -> String {
    let mut out = String::from("| Group | Setting | n | Mean PPL |\n|---|---|---|---|\n");
    for row in &table.rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            row.side.as_str(),
            row.setting.label(),
            row.n_items,
            format_ppl(row.mean_ppl),
        ));
    }
    out
}
