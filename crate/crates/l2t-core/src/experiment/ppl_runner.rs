//! The filtered-question perplexity study over a completed experiment.

use std::collections::BTreeSet;
use std::path::PathBuf;

use super::config::{LoadedConfig, Mode};
use super::runner::{language_pairs, prepare, read_transcripts};
use super::ExperimentError;
use crate::metrics::{
    consistency_csv, consistency_markdown, consistency_partition, ConsistencyRow, RunGrid,
};
use crate::ppl::{ppl_csv, ppl_markdown, ppl_study, PplStudyRow, PplStudyTable};
use crate::prompt::enumerate_matrix;
use crate::provider::{
    HttpProvider, LogprobProvider, ProviderConfig, ScriptedModelSpec, StubLogprobProvider,
};
use crate::types::{EvalTranscript, L2TSetting, LanguageCode, MCQItem, SettingKind};

#[derive(Debug)]
pub struct PplStudyOutcome {
    pub dir: PathBuf,
    pub report_paths: Vec<PathBuf>,
    pub table: PplStudyTable,
    pub counts: Vec<ConsistencyRow>,
}

/// Build the logprob backend the config names and run the study.
pub fn run_ppl_study(loaded: &LoadedConfig) -> Result<PplStudyOutcome, ExperimentError> {
    let provider: Box<dyn LogprobProvider> = match loaded.config.mode {
        Mode::Scripted => {
            let spec_path =
                loaded.resolve(loaded.config.scripted_spec.as_ref().ok_or_else(|| {
                    ExperimentError::MissingExperiment(
                        "scripted mode requires scripted_spec".into(),
                    )
                })?);
            let spec = ScriptedModelSpec::load(&spec_path)?;
            Box::new(StubLogprobProvider::from_spec(&spec))
        }
        Mode::Live => {
            let config_path =
                loaded.resolve(loaded.config.provider_config.as_ref().ok_or_else(|| {
                    ExperimentError::MissingExperiment("live mode requires provider_config".into())
                })?);
            let provider_config = ProviderConfig::load(&config_path)?;
            Box::new(HttpProvider::new(provider_config))
        }
    };
    run_ppl_study_with(loaded, provider.as_ref())
}

/// Run the study against an injected logprob provider.
pub fn run_ppl_study_with(
    loaded: &LoadedConfig,
    provider: &dyn LogprobProvider,
) -> Result<PplStudyOutcome, ExperimentError> {
    let workspace = prepare(loaded)?;
    if !workspace.transcripts_dir.exists() {
        return Err(ExperimentError::MissingExperiment(format!(
            "no transcripts at {}; run the experiment first",
            workspace.transcripts_dir.display()
        )));
    }
    let transcripts = read_transcripts(&workspace)?;
    let pairs = language_pairs(&workspace.items);
    if pairs.is_empty() {
        return Err(ExperimentError::MissingExperiment(
            "the datasets carry no paired language variants".into(),
        ));
    }
    if !loaded.config.kinds.contains(&SettingKind::Baseline) {
        return Err(ExperimentError::MissingExperiment(
            "the consistency filter needs baseline runs in the experiment".into(),
        ));
    }

    let study_dir = workspace.dir.join("ppl-study");
    std::fs::create_dir_all(&study_dir).map_err(|e| ExperimentError::Io {
        path: study_dir.display().to_string(),
        source: e,
    })?;

    let mut all_rows: Vec<PplStudyRow> = Vec::new();
    let mut all_records = Vec::new();
    let mut dropped = 0usize;
    let mut counts = Vec::new();

    for lang in LanguageCode::ALL {
        if lang == LanguageCode::En {
            continue;
        }
        let lang_pairs: Vec<_> = pairs
            .iter()
            .filter(|(orig, _)| orig.language() == lang)
            .cloned()
            .collect();
        if lang_pairs.is_empty() {
            continue;
        }
        let (en_grid, orig_grid) =
            complete_baseline_grids(&lang_pairs, &transcripts, loaded.config.run_count)?;
        let partition = consistency_partition(&en_grid, &orig_grid)?;
        counts.push(ConsistencyRow {
            orig_lang: lang,
            en_correct_orig_wrong: partition.en_correct_orig_wrong.len(),
            en_wrong_orig_correct: partition.en_wrong_orig_correct.len(),
        });

        let settings = study_settings(loaded, &lang_pairs);
        let table = ppl_study(
            &lang_pairs,
            &partition,
            &settings,
            provider,
            &workspace.templates,
        )?;
        all_rows.extend(table.rows);
        all_records.extend(table.records);
        dropped += table.dropped;
    }

    let table = PplStudyTable {
        rows: all_rows,
        records: all_records,
        dropped,
    };

    let mut report_paths = Vec::new();
    let ppl_csv_path = study_dir.join("ppl.csv");
    std::fs::write(&ppl_csv_path, ppl_csv(&table)).map_err(|e| ExperimentError::Io {
        path: ppl_csv_path.display().to_string(),
        source: e,
    })?;
    report_paths.push(ppl_csv_path);
    let ppl_md_path = study_dir.join("ppl.md");
    std::fs::write(&ppl_md_path, ppl_markdown(&table)).map_err(|e| ExperimentError::Io {
        path: ppl_md_path.display().to_string(),
        source: e,
    })?;
    report_paths.push(ppl_md_path);
    let counts_csv_path = study_dir.join("counts.csv");
    std::fs::write(&counts_csv_path, consistency_csv(&counts)).map_err(|e| {
        ExperimentError::Io {
            path: counts_csv_path.display().to_string(),
            source: e,
        }
    })?;
    report_paths.push(counts_csv_path);
    let counts_md_path = study_dir.join("counts.md");
    std::fs::write(&counts_md_path, consistency_markdown(&counts)).map_err(|e| {
        ExperimentError::Io {
            path: counts_md_path.display().to_string(),
            source: e,
        }
    })?;
    report_paths.push(counts_md_path);

    Ok(PplStudyOutcome {
        dir: study_dir,
        report_paths,
        table,
        counts,
    })
}

/// Baseline correctness grids for both variants of every pair; any
/// missing run means the experiment is incomplete.
fn complete_baseline_grids(
    pairs: &[(MCQItem, MCQItem)],
    transcripts: &[EvalTranscript],
    run_count: u32,
) -> Result<(RunGrid, RunGrid), ExperimentError> {
    let mut correctness = std::collections::BTreeMap::new();
    for t in transcripts {
        if t.setting.kind == SettingKind::Baseline {
            correctness.insert((t.item_id.clone(), t.run_index), t.correct);
        }
    }
    let mut en_grid = RunGrid::new();
    let mut orig_grid = RunGrid::new();
    for (orig, en) in pairs {
        let mut orig_runs = Vec::new();
        let mut en_runs = Vec::new();
        for run in 0..run_count {
            let o = correctness
                .get(&(orig.id().to_string(), run))
                .ok_or_else(|| missing_cell(orig.id(), run))?;
            let e = correctness
                .get(&(en.id().to_string(), run))
                .ok_or_else(|| missing_cell(en.id(), run))?;
            orig_runs.push(*o);
            en_runs.push(*e);
        }
        orig_grid.insert(orig.id().to_string(), orig_runs);
        en_grid.insert(orig.id().to_string(), en_runs);
    }
    Ok((en_grid, orig_grid))
}

fn missing_cell(item_id: &str, run: u32) -> ExperimentError {
    ExperimentError::MissingExperiment(format!(
        "baseline run {run} of item {item_id} has no transcript; run the experiment first"
    ))
}

/// The unique settings the study measures for one language's pairs,
/// ordered by label.
fn study_settings(loaded: &LoadedConfig, pairs: &[(MCQItem, MCQItem)]) -> Vec<L2TSetting> {
    let representatives: Vec<MCQItem> = pairs
        .first()
        .map(|(orig, en)| vec![orig.clone(), en.clone()])
        .unwrap_or_default();
    let matrix = enumerate_matrix(
        &representatives,
        &loaded.config.kinds,
        &loaded.config.thought_langs,
    );
    let unique: BTreeSet<L2TSetting> = matrix.into_iter().map(|(_, s)| s).collect();
    let mut settings: Vec<L2TSetting> = unique.into_iter().collect();
    settings.sort_by_key(|s| s.label());
    settings
}
