//! Cell scheduling, resumable execution, and report emission.
//!
//! Every (item, setting, run) cell persists its transcript as one JSON
//! file keyed by a deterministic cell id. Rerunning skips persisted
//! cells, so interrupted experiments resume instead of repeating calls;
//! reports are a deterministic fold over the persisted transcripts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::config::{LoadedConfig, Mode};
use super::ExperimentError;
use crate::analysis::{detect_language, extract_answer, MarkerTable};
use crate::dataset::DatasetManifest;
use crate::metrics::{
    accuracy_csv, accuracy_markdown, aggregate, consistency_csv, consistency_markdown,
    consistency_partition, runs_csv, summarize_run, ConsistencyRow, RunGrid,
};
use crate::prompt::{build_prompt_pair, enumerate_matrix, PromptTemplateSet};
use crate::provider::{
    CachedChat, ChatProvider, ChatRequest, HttpProvider, ProviderConfig, ResponseCache,
    ScriptedChatProvider, ScriptedModel, ScriptedModelSpec,
};
use crate::types::{EvalTranscript, L2TSetting, LanguageCode, MCQItem};
use crate::util::{sanitize_component, short_digest};

/// One schedulable unit: an item under a setting in one run.
#[derive(Debug, Clone)]
pub struct Cell {
    pub item: MCQItem,
    pub setting: L2TSetting,
    pub run_index: u32,
}

impl Cell {
    /// Deterministic, filesystem-safe, collision-resistant identifier.
    pub fn id(&self) -> String {
        let label = self.setting.label();
        let raw = format!("{}\u{1}{}\u{1}{}", self.item.id(), label, self.run_index);
        format!(
            "{}__{}__r{}-{}",
            sanitize_component(self.item.id()),
            sanitize_component(&label),
            self.run_index,
            short_digest(raw.as_bytes()),
        )
    }
}

/// A cell that could not be filled, and why.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellFailure {
    pub cell_id: String,
    pub item_id: String,
    pub setting: String,
    pub run_index: u32,
    pub error: String,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub dir: PathBuf,
    pub total_cells: usize,
    pub completed_cells: usize,
    pub failures: Vec<CellFailure>,
    /// Provider calls that actually left the cache this invocation.
    pub fresh_provider_calls: usize,
    pub report_paths: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty() && self.completed_cells == self.total_cells
    }
}

/// Immutable inputs shared by the run, study, and report entry points.
pub(crate) struct Workspace {
    pub templates: PromptTemplateSet,
    pub markers: MarkerTable,
    pub items: Vec<MCQItem>,
    pub matrix: Vec<(MCQItem, L2TSetting)>,
    pub cells: Vec<Cell>,
    pub dir: PathBuf,
    pub transcripts_dir: PathBuf,
    pub reports_dir: PathBuf,
}

pub(crate) fn prepare(loaded: &LoadedConfig) -> Result<Workspace, ExperimentError> {
    let config = &loaded.config;
    config.validate()?;
    let templates = PromptTemplateSet::load(loaded.templates_dir())?;
    let markers = MarkerTable::load(&loaded.templates_dir())?;
    let manifest = DatasetManifest::load(&loaded.manifest_path())?;
    let manifest_dir = loaded
        .manifest_path()
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let mut items = Vec::new();
    for tag in &config.datasets {
        let loaded_items = manifest.load_tag(tag, &manifest_dir)?;
        log::info!("dataset {tag}: {} records", loaded_items.len());
        for (topic, count) in crate::dataset::topic_counts(&loaded_items) {
            log::info!("dataset {tag}: topic {topic:?}: {count}");
        }
        items.extend(loaded_items);
    }
    // Cells are keyed by item id, so ids must stay unique across every
    // dataset the config combines, not just within one file.
    let mut seen_ids = std::collections::HashSet::new();
    for item in &items {
        if !seen_ids.insert(item.id()) {
            return Err(ExperimentError::DuplicateItemId(item.id().to_string()));
        }
    }
    let matrix = enumerate_matrix(&items, &config.kinds, &config.thought_langs);
    let mut cells = Vec::with_capacity(matrix.len() * config.run_count as usize);
    for (item, setting) in &matrix {
        for run_index in 0..config.run_count {
            cells.push(Cell {
                item: item.clone(),
                setting: *setting,
                run_index,
            });
        }
    }
    let dir = loaded.experiment_dir();
    let transcripts_dir = dir.join("transcripts");
    let reports_dir = dir.join("reports");
    Ok(Workspace {
        templates,
        markers,
        items,
        matrix,
        cells,
        dir,
        transcripts_dir,
        reports_dir,
    })
}

fn io_error(path: &Path, source: std::io::Error) -> ExperimentError {
    ExperimentError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| io_error(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_error(path, e))?;
    Ok(())
}

/// Build the backend the config names and run the experiment against it.
pub fn run_experiment(loaded: &LoadedConfig) -> Result<ExperimentOutcome, ExperimentError> {
    let workspace = prepare(loaded)?;
    let provider = build_chat_provider(loaded, &workspace)?;
    run_in_workspace(loaded, &workspace, provider.as_ref())
}

/// Run against an injected provider; handy for tests and wrappers.
pub fn run_experiment_with_provider(
    loaded: &LoadedConfig,
    provider: &dyn ChatProvider,
) -> Result<ExperimentOutcome, ExperimentError> {
    let workspace = prepare(loaded)?;
    run_in_workspace(loaded, &workspace, provider)
}

pub(crate) fn build_chat_provider(
    loaded: &LoadedConfig,
    workspace: &Workspace,
) -> Result<Box<dyn ChatProvider>, ExperimentError> {
    match loaded.config.mode {
        Mode::Scripted => {
            let spec_path =
                loaded.resolve(loaded.config.scripted_spec.as_ref().expect("validated"));
            let spec = ScriptedModelSpec::load(&spec_path)?;
            let model = ScriptedModel::with_markers(spec, workspace.markers.clone());
            let provider =
                ScriptedChatProvider::new(model, &workspace.matrix, &workspace.templates)?;
            Ok(Box::new(provider))
        }
        Mode::Live => {
            let config_path =
                loaded.resolve(loaded.config.provider_config.as_ref().expect("validated"));
            let provider_config = ProviderConfig::load(&config_path)?;
            Ok(Box::new(HttpProvider::new(provider_config)))
        }
    }
}

enum CellStatus {
    /// Transcript already on disk from an earlier run.
    Resumed,
    /// Filled now; `cached` when the response came from the cache.
    Filled {
        cached: bool,
    },
    Failed(String),
}

fn process_cell(
    cell: &Cell,
    loaded: &LoadedConfig,
    workspace: &Workspace,
    cache: &ResponseCache,
    provider: &dyn ChatProvider,
) -> CellStatus {
    let path = workspace
        .transcripts_dir
        .join(format!("{}.json", cell.id()));
    if path.exists() {
        match std::fs::read(&path)
            .ok()
            .and_then(|bytes| serde_json::from_slice::<EvalTranscript>(&bytes).ok())
        {
            Some(_) => return CellStatus::Resumed,
            None => log::warn!("re-filling unreadable transcript {}", path.display()),
        }
    }

    let prompts = match build_prompt_pair(&cell.item, &cell.setting, &workspace.templates) {
        Ok(p) => p,
        Err(err) => return CellStatus::Failed(err.to_string()),
    };
    let mut request = ChatRequest::new(prompts.system_prompt, prompts.user_prompt);
    if let Some(cap) = loaded.config.max_new_tokens {
        request.max_new_tokens = cap;
    }
    request.seed = loaded.config.seeds.get(cell.run_index as usize).copied();

    let cache_run_index = if loaded.config.collapse_runs {
        0
    } else {
        cell.run_index
    };
    let (response, cached) = match CachedChat::new(provider, cache).chat(&request, cache_run_index)
    {
        Ok(r) => r,
        Err(err) => return CellStatus::Failed(err.to_string()),
    };

    let extraction = extract_answer(&response.text, &workspace.markers);
    let detected = detect_language(&response.text);
    let mut transcript = EvalTranscript::new(
        cell.item.id(),
        cell.item.gold(),
        cell.setting,
        cell.run_index,
        request.system_prompt.clone(),
        request.user_prompt.clone(),
        response.text.clone(),
        extraction.letter,
        detected,
        request.params(),
    );
    transcript.truncated = response.truncated;
    transcript.needs_audit = extraction.ambiguous;

    let bytes = serde_json::to_vec_pretty(&transcript).expect("transcript serializes");
    match write_atomic(&path, &bytes) {
        Ok(()) => CellStatus::Filled { cached },
        Err(err) => CellStatus::Failed(err.to_string()),
    }
}

fn run_in_workspace(
    loaded: &LoadedConfig,
    workspace: &Workspace,
    provider: &dyn ChatProvider,
) -> Result<ExperimentOutcome, ExperimentError> {
    std::fs::create_dir_all(&workspace.transcripts_dir)
        .map_err(|e| io_error(&workspace.transcripts_dir, e))?;
    std::fs::create_dir_all(&workspace.reports_dir)
        .map_err(|e| io_error(&workspace.reports_dir, e))?;
    let cache =
        ResponseCache::open(loaded.cache_dir()).map_err(|e| io_error(&loaded.cache_dir(), e))?;

    let cursor = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, CellStatus)>> = Mutex::new(Vec::new());
    let bound = provider
        .max_in_flight()
        .map_or(loaded.config.concurrency, |cap| {
            loaded.config.concurrency.min(cap)
        });
    let workers = bound.min(workspace.cells.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = cursor.fetch_add(1, Ordering::SeqCst);
                let Some(cell) = workspace.cells.get(index) else {
                    break;
                };
                let status = process_cell(cell, loaded, workspace, &cache, provider);
                results
                    .lock()
                    .expect("worker poisoned the lock")
                    .push((index, status));
            });
        }
    });

    let mut failures = Vec::new();
    let mut completed = 0usize;
    let mut fresh_calls = 0usize;
    let mut results = results.into_inner().expect("worker poisoned the lock");
    results.sort_by_key(|(index, _)| *index);
    for (index, status) in results {
        let cell = &workspace.cells[index];
        match status {
            CellStatus::Resumed => completed += 1,
            CellStatus::Filled { cached } => {
                completed += 1;
                if !cached {
                    fresh_calls += 1;
                }
            }
            CellStatus::Failed(error) => failures.push(CellFailure {
                cell_id: cell.id(),
                item_id: cell.item.id().to_string(),
                setting: cell.setting.label(),
                run_index: cell.run_index,
                error,
            }),
        }
    }
    failures.sort_by(|a, b| a.cell_id.cmp(&b.cell_id));

    let report_paths = build_reports(loaded, workspace)?;

    let failures_path = workspace.dir.join("failures.json");
    if failures.is_empty() {
        if failures_path.exists() {
            std::fs::remove_file(&failures_path).map_err(|e| io_error(&failures_path, e))?;
        }
    } else {
        write_atomic(
            &failures_path,
            &serde_json::to_vec_pretty(&failures).expect("failures serialize"),
        )?;
    }

    Ok(ExperimentOutcome {
        dir: workspace.dir.clone(),
        total_cells: workspace.cells.len(),
        completed_cells: completed,
        failures,
        fresh_provider_calls: fresh_calls,
        report_paths,
    })
}

/// Read the persisted transcript of every cell that has one.
pub(crate) fn read_transcripts(
    workspace: &Workspace,
) -> Result<Vec<EvalTranscript>, ExperimentError> {
    let mut transcripts = Vec::new();
    for cell in &workspace.cells {
        let path = workspace
            .transcripts_dir
            .join(format!("{}.json", cell.id()));
        if !path.exists() {
            continue;
        }
        let bytes = std::fs::read(&path).map_err(|e| io_error(&path, e))?;
        let transcript: EvalTranscript =
            serde_json::from_slice(&bytes).map_err(|err| ExperimentError::Corrupt {
                path: path.display().to_string(),
                reason: err.to_string(),
            })?;
        transcripts.push(transcript);
    }
    Ok(transcripts)
}

/// Regenerate every report from the persisted transcripts.
pub fn regenerate_reports(loaded: &LoadedConfig) -> Result<Vec<PathBuf>, ExperimentError> {
    let workspace = prepare(loaded)?;
    if !workspace.transcripts_dir.exists() {
        return Err(ExperimentError::MissingExperiment(format!(
            "no transcripts at {}",
            workspace.transcripts_dir.display()
        )));
    }
    std::fs::create_dir_all(&workspace.reports_dir)
        .map_err(|e| io_error(&workspace.reports_dir, e))?;
    build_reports(loaded, &workspace)
}

fn build_reports(
    loaded: &LoadedConfig,
    workspace: &Workspace,
) -> Result<Vec<PathBuf>, ExperimentError> {
    let transcripts = read_transcripts(workspace)?;
    let mut paths = Vec::new();

    // Group by setting, then run.
    let mut by_setting: BTreeMap<String, BTreeMap<u32, Vec<&EvalTranscript>>> = BTreeMap::new();
    for transcript in &transcripts {
        by_setting
            .entry(transcript.setting.label())
            .or_default()
            .entry(transcript.run_index)
            .or_default()
            .push(transcript);
    }

    let mut run_summaries = Vec::new();
    let mut cells = Vec::new();
    for runs in by_setting.values() {
        let mut setting_runs = Vec::new();
        for per_run in runs.values() {
            let owned: Vec<EvalTranscript> = per_run.iter().map(|t| (*t).clone()).collect();
            setting_runs.push(summarize_run(&owned)?);
        }
        cells.push(aggregate(&setting_runs)?);
        run_summaries.extend(setting_runs);
    }

    let runs_path = workspace.reports_dir.join("runs.csv");
    write_atomic(&runs_path, runs_csv(&run_summaries).as_bytes())?;
    paths.push(runs_path);

    let acc_csv_path = workspace.reports_dir.join("accuracy.csv");
    write_atomic(&acc_csv_path, accuracy_csv(&cells).as_bytes())?;
    paths.push(acc_csv_path);

    let acc_md_path = workspace.reports_dir.join("accuracy.md");
    write_atomic(&acc_md_path, accuracy_markdown(&cells).as_bytes())?;
    paths.push(acc_md_path);

    let rows = consistency_rows(&workspace.items, &transcripts, loaded.config.run_count);
    if !rows.is_empty() {
        let csv_path = workspace.reports_dir.join("consistency.csv");
        write_atomic(&csv_path, consistency_csv(&rows).as_bytes())?;
        paths.push(csv_path);
        let md_path = workspace.reports_dir.join("consistency.md");
        write_atomic(&md_path, consistency_markdown(&rows).as_bytes())?;
        paths.push(md_path);
    }
    Ok(paths)
}

/// Original-language/English item pairs present in the loaded datasets,
/// keyed for the partition by the original item's id.
pub(crate) fn language_pairs(items: &[MCQItem]) -> Vec<(MCQItem, MCQItem)> {
    let by_id: BTreeMap<&str, &MCQItem> = items.iter().map(|i| (i.id(), i)).collect();
    let mut pairs = Vec::new();
    for item in items {
        if item.language() == LanguageCode::En {
            continue;
        }
        let Some(pair_id) = item.paired_id() else {
            continue;
        };
        let Some(en) = by_id.get(pair_id) else {
            continue;
        };
        if en.language() == LanguageCode::En {
            pairs.push((item.clone(), (*en).clone()));
        }
    }
    pairs
}

/// Per-item baseline correctness across runs; `None` when any run of any
/// paired item is missing.
fn baseline_grids(
    pairs: &[(MCQItem, MCQItem)],
    transcripts: &[EvalTranscript],
    run_count: u32,
) -> Option<(RunGrid, RunGrid)> {
    let mut correctness: BTreeMap<(&str, u32), bool> = BTreeMap::new();
    for t in transcripts {
        if t.setting.kind == crate::types::SettingKind::Baseline {
            correctness.insert((t.item_id.as_str(), t.run_index), t.correct);
        }
    }
    let mut en_grid = RunGrid::new();
    let mut orig_grid = RunGrid::new();
    for (orig, en) in pairs {
        let mut orig_runs = Vec::with_capacity(run_count as usize);
        let mut en_runs = Vec::with_capacity(run_count as usize);
        for run in 0..run_count {
            orig_runs.push(*correctness.get(&(orig.id(), run))?);
            en_runs.push(*correctness.get(&(en.id(), run))?);
        }
        orig_grid.insert(orig.id().to_string(), orig_runs);
        en_grid.insert(orig.id().to_string(), en_runs);
    }
    Some((en_grid, orig_grid))
}

/// Consistency counts per original language, when paired variants with
/// complete baseline runs exist.
fn consistency_rows(
    items: &[MCQItem],
    transcripts: &[EvalTranscript],
    run_count: u32,
) -> Vec<ConsistencyRow> {
    let pairs = language_pairs(items);
    let mut rows = Vec::new();
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
        let Some((en_grid, orig_grid)) = baseline_grids(&lang_pairs, transcripts, run_count) else {
            continue;
        };
        let Ok(partition) = consistency_partition(&en_grid, &orig_grid) else {
            continue;
        };
        rows.push(ConsistencyRow {
            orig_lang: lang,
            en_correct_orig_wrong: partition.en_correct_orig_wrong.len(),
            en_wrong_orig_correct: partition.en_wrong_orig_correct.len(),
        });
    }
    rows
}
