//! CSV and Markdown report rendering.
//!
//! Percentages print with two decimals; rows sort by setting label so
//! equal inputs always produce identical bytes.

use std::collections::BTreeMap;

use super::summary::{delta_vs_baseline, AggregateCell, RunSummary};
use crate::types::{LanguageCode, SettingKind};

/// Render a [0, 1] fraction as a two-decimal percentage.
pub fn percent(fraction: f64) -> String {
    format!("{:.2}", fraction * 100.0)
}

/// Signed accuracy difference against the same-input-language baseline
/// cell, when both sides exist; empty for baseline rows themselves.
fn baseline_deltas(cells: &[&AggregateCell]) -> BTreeMap<String, String> {
    let baselines: BTreeMap<LanguageCode, &AggregateCell> = cells
        .iter()
        .filter(|c| c.setting.kind == SettingKind::Baseline)
        .map(|c| (c.setting.input_lang, *c))
        .collect();
    let mut deltas = BTreeMap::new();
    for cell in cells {
        if cell.setting.kind == SettingKind::Baseline {
            continue;
        }
        if let Some(baseline) = baselines.get(&cell.setting.input_lang) {
            let delta = delta_vs_baseline(cell, baseline);
            deltas.insert(cell.setting.label(), format!("{:+.2}", delta * 100.0));
        }
    }
    deltas
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn opt_lang(lang: Option<LanguageCode>) -> &'static str {
    lang.map(LanguageCode::as_str).unwrap_or("")
}

/// One CSV row per aggregate cell. The last column carries the signed
/// delta against the matching baseline, where one exists.
pub fn accuracy_csv(cells: &[AggregateCell]) -> String {
    let mut cells: Vec<&AggregateCell> = cells.iter().collect();
    cells.sort_by_key(|c| c.setting.label());
    let deltas = baseline_deltas(&cells);
    let mut out = String::from(
        "setting,kind,input,thought,output,variant,n_items,n_runs,accuracy_pct,accuracy_stddev_pct,in_ratio_pct,delta_vs_baseline_pct\n",
    );
    for cell in cells {
        let setting = cell.setting;
        let variant = setting
            .persona_variant
            .map(|v| v.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            csv_escape(&setting.label()),
            setting.kind,
            setting.input_lang,
            opt_lang(setting.thought_lang),
            opt_lang(setting.output_lang),
            variant,
            cell.n_items,
            cell.n_runs,
            percent(cell.mean_accuracy),
            percent(cell.accuracy_stddev),
            percent(cell.mean_in_ratio),
            deltas.get(&setting.label()).cloned().unwrap_or_default(),
        ));
    }
    out
}

/// Accuracy table with `mean (±stddev)` cells, the input-language ratio,
/// and the delta against the matching baseline.
pub fn accuracy_markdown(cells: &[AggregateCell]) -> String {
    let mut cells: Vec<&AggregateCell> = cells.iter().collect();
    cells.sort_by_key(|c| c.setting.label());
    let deltas = baseline_deltas(&cells);
    let mut out = String::from("| Setting | Acc | IN % | Δ vs baseline |\n|---|---|---|---|\n");
    for cell in cells {
        out.push_str(&format!(
            "| {} | {} (±{}) | {} | {} |\n",
            cell.setting.label(),
            percent(cell.mean_accuracy),
            percent(cell.accuracy_stddev),
            percent(cell.mean_in_ratio),
            deltas
                .get(&cell.setting.label())
                .map(String::as_str)
                .unwrap_or(""),
        ));
    }
    out
}

/// One CSV row per (setting, run).
pub fn runs_csv(runs: &[RunSummary]) -> String {
    let mut runs: Vec<&RunSummary> = runs.iter().collect();
    runs.sort_by_key(|r| (r.setting.label(), r.run_index));
    let mut out = String::from("setting,run,n_items,accuracy_pct,in_ratio_pct\n");
    for run in runs {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_escape(&run.setting.label()),
            run.run_index,
            run.n_items,
            percent(run.accuracy),
            percent(run.in_ratio),
        ));
    }
    out
}

/// One row of the unanimous-disagreement count table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyRow {
    pub orig_lang: LanguageCode,
    pub en_correct_orig_wrong: usize,
    pub en_wrong_orig_correct: usize,
}

pub fn consistency_csv(rows: &[ConsistencyRow]) -> String {
    let mut rows: Vec<&ConsistencyRow> = rows.iter().collect();
    rows.sort_by_key(|r| r.orig_lang);
    let mut out = String::from("comparison,en_correct_orig_wrong,en_wrong_orig_correct\n");
    for row in rows {
        out.push_str(&format!(
            "EN vs {},{},{}\n",
            row.orig_lang, row.en_correct_orig_wrong, row.en_wrong_orig_correct
        ));
    }
    out
}

pub fn consistency_markdown(rows: &[ConsistencyRow]) -> String {
    let mut rows: Vec<&ConsistencyRow> = rows.iter().collect();
    rows.sort_by_key(|r| r.orig_lang);
    let mut out = String::from("|  | EN O / Orig X | EN X / Orig O |\n|---|---|---|\n");
    for row in rows {
        out.push_str(&format!(
            "| EN vs {} | {} | {} |\n",
            row.orig_lang, row.en_correct_orig_wrong, row.en_wrong_orig_correct
        ));
    }
    out
}
