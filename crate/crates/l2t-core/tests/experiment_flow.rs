//! End-to-end scripted experiments: cell coverage, analytic metrics,
//! caching, resume, and the perplexity study.

mod common;

use std::sync::atomic::{AtomicI64, Ordering};

use common::{load_templates, scripted_scenario};
use l2t_core::dataset::DatasetManifest;
use l2t_core::experiment::{
    regenerate_reports, run_experiment, run_experiment_with_provider, run_ppl_study,
    ExperimentError,
};
use l2t_core::ppl::PartitionSide;
use l2t_core::prompt::enumerate_matrix;
use l2t_core::provider::{
    ChatProvider, ChatRequest, ChatResponse, ProviderError, ScriptedChatProvider, ScriptedModel,
    ScriptedModelSpec,
};
use l2t_core::types::{LanguageCode, SettingKind};

/// Pull one column of a rendered CSV, keyed by the setting label.
fn csv_column(csv: &str, label: &str, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let index = header
        .iter()
        .position(|h| *h == column)
        .unwrap_or_else(|| panic!("no column {column}"));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0] == label {
            return fields[index].to_string();
        }
    }
    panic!("no row for {label} in:\n{csv}");
}

#[test]
fn scripted_run_covers_every_cell_with_analytic_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scripted_scenario(
        dir.path(),
        2,
        &[SettingKind::Baseline, SettingKind::Align],
        3,
    );
    let outcome = run_experiment(&scenario.loaded).unwrap();
    assert!(outcome.is_complete());
    // 4 items, 2 settings each, 3 runs.
    assert_eq!(outcome.total_cells, 24);
    assert_eq!(outcome.fresh_provider_calls, 24);
    let transcripts = std::fs::read_dir(outcome.dir.join("transcripts"))
        .unwrap()
        .count();
    assert_eq!(transcripts, 24);

    let csv = std::fs::read_to_string(outcome.dir.join("reports/accuracy.csv")).unwrap();
    assert_eq!(csv_column(&csv, "baseline I:KO", "accuracy_pct"), "50.00");
    assert_eq!(csv_column(&csv, "baseline I:EN", "accuracy_pct"), "100.00");
    assert_eq!(
        csv_column(&csv, "align I:KO-T:EN-O:KO", "accuracy_pct"),
        "100.00"
    );
    assert_eq!(
        csv_column(&csv, "align I:EN-T:KO-O:EN", "accuracy_pct"),
        "50.00"
    );
    // Deterministic backend: no spread across runs.
    assert_eq!(
        csv_column(&csv, "baseline I:KO", "accuracy_stddev_pct"),
        "0.00"
    );
    // The align setting answers in the pinned output language.
    assert_eq!(
        csv_column(&csv, "align I:EN-T:KO-O:EN", "in_ratio_pct"),
        "100.00"
    );
    assert!(!outcome.dir.join("failures.json").exists());
}

#[test]
fn rerunning_a_completed_experiment_makes_no_provider_calls() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scripted_scenario(dir.path(), 2, &[SettingKind::Baseline], 3);
    let first = run_experiment(&scenario.loaded).unwrap();
    assert_eq!(first.fresh_provider_calls, 12);
    let second = run_experiment(&scenario.loaded).unwrap();
    assert!(second.is_complete());
    assert_eq!(
        second.fresh_provider_calls, 0,
        "resume must skip cached cells"
    );

    // Byte-identical reports across the two runs.
    for name in [
        "reports/accuracy.csv",
        "reports/accuracy.md",
        "reports/runs.csv",
    ] {
        let a = std::fs::read(first.dir.join(name)).unwrap();
        let b = std::fs::read(second.dir.join(name)).unwrap();
        assert_eq!(a, b, "{name} changed across reruns");
    }
}

#[test]
fn collapsed_runs_share_one_provider_call_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let mut scenario = scripted_scenario(dir.path(), 2, &[SettingKind::Baseline], 3);
    scenario.loaded.config.collapse_runs = true;
    let outcome = run_experiment(&scenario.loaded).unwrap();
    assert!(outcome.is_complete());
    assert_eq!(outcome.total_cells, 12);
    assert_eq!(
        outcome.fresh_provider_calls, 4,
        "three runs of each cell must collapse into one call"
    );
    // Identical runs leave no spread.
    let csv = std::fs::read_to_string(outcome.dir.join("reports/accuracy.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').nth(9).unwrap(), "0.00");
    }
}

#[test]
fn cache_survives_losing_the_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scripted_scenario(dir.path(), 2, &[SettingKind::Baseline], 2);
    let first = run_experiment(&scenario.loaded).unwrap();
    std::fs::remove_dir_all(first.dir.join("transcripts")).unwrap();
    let second = run_experiment(&scenario.loaded).unwrap();
    assert!(second.is_complete());
    assert_eq!(
        second.fresh_provider_calls, 0,
        "responses must replay from the cache"
    );
}

#[test]
fn single_run_reports_zero_stddev() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scripted_scenario(dir.path(), 2, &[SettingKind::Baseline], 1);
    let outcome = run_experiment(&scenario.loaded).unwrap();
    let csv = std::fs::read_to_string(outcome.dir.join("reports/accuracy.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let stddev = line.split(',').nth(9).unwrap();
        assert_eq!(stddev, "0.00");
    }
}

/// Delegates to a real provider until the budget runs out, then fails
/// with transport errors; simulates killing an experiment mid-flight.
struct FailAfter<'a> {
    inner: &'a dyn ChatProvider,
    budget: AtomicI64,
}

impl ChatProvider for FailAfter<'_> {
    fn provider_id(&self) -> &str {
        self.inner.provider_id()
    }
    fn model_id(&self) -> &str {
        self.inner.model_id()
    }
    fn chat(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        if self.budget.fetch_sub(1, Ordering::SeqCst) <= 0 {
            return Err(ProviderError::Transport {
                attempts: 1,
                message: "interrupted".into(),
            });
        }
        self.inner.chat(request)
    }
}

fn scripted_provider(scenario: &common::Scenario, kinds: &[SettingKind]) -> ScriptedChatProvider {
    let manifest =
        DatasetManifest::load(&scenario.loaded.resolve("manifest.toml".as_ref())).unwrap();
    let base = scenario.loaded.base_dir.clone();
    let mut items = manifest.load_tag("ko", &base).unwrap();
    items.extend(manifest.load_tag("en", &base).unwrap());
    let matrix = enumerate_matrix(&items, kinds, &[LanguageCode::En, LanguageCode::Ko]);
    let spec = ScriptedModelSpec::load(&scenario.loaded.resolve("scripted.json".as_ref())).unwrap();
    ScriptedChatProvider::new(ScriptedModel::new(spec), &matrix, &load_templates()).unwrap()
}

#[test]
fn interrupted_experiments_resume_to_identical_reports() {
    let kinds = [SettingKind::Baseline, SettingKind::Align];

    // Reference: an uninterrupted run in its own directory.
    let ref_dir = tempfile::tempdir().unwrap();
    let reference = scripted_scenario(ref_dir.path(), 3, &kinds, 3);
    let reference_outcome = run_experiment(&reference.loaded).unwrap();

    // Interrupted run: the provider dies after 11 calls.
    let dir = tempfile::tempdir().unwrap();
    let scenario = scripted_scenario(dir.path(), 3, &kinds, 3);
    let inner = scripted_provider(&scenario, &kinds);
    let flaky = FailAfter {
        inner: &inner,
        budget: AtomicI64::new(11),
    };
    let partial = run_experiment_with_provider(&scenario.loaded, &flaky).unwrap();
    assert!(!partial.is_complete());
    assert_eq!(partial.completed_cells, 11);
    assert!(partial.dir.join("failures.json").exists());

    // Resume with the healthy backend.
    let resumed = run_experiment(&scenario.loaded).unwrap();
    assert!(resumed.is_complete());
    assert!(
        !resumed.dir.join("failures.json").exists(),
        "failure report must clear once every cell fills"
    );

    for name in [
        "reports/accuracy.csv",
        "reports/accuracy.md",
        "reports/runs.csv",
        "reports/consistency.csv",
        "reports/consistency.md",
    ] {
        let a = std::fs::read(reference_outcome.dir.join(name)).unwrap();
        let b = std::fs::read(resumed.dir.join(name)).unwrap();
        assert_eq!(a, b, "{name} diverged after resume");
    }
}

#[test]
fn report_regeneration_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scripted_scenario(dir.path(), 2, &[SettingKind::Baseline], 2);
    let outcome = run_experiment(&scenario.loaded).unwrap();
    let before = std::fs::read(outcome.dir.join("reports/accuracy.csv")).unwrap();
    let paths = regenerate_reports(&scenario.loaded).unwrap();
    assert!(!paths.is_empty());
    let after = std::fs::read(outcome.dir.join("reports/accuracy.csv")).unwrap();
    assert_eq!(before, after);
}

#[test]
fn overlapping_item_ids_across_datasets_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut scenario = scripted_scenario(dir.path(), 2, &[SettingKind::Baseline], 1);
    // Load the same tag twice: every id collides.
    scenario.loaded.config.datasets = vec!["ko".into(), "ko".into()];
    let err = run_experiment(&scenario.loaded).unwrap_err();
    assert!(matches!(err, ExperimentError::DuplicateItemId(_)));
}

#[test]
fn ppl_study_needs_a_completed_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scripted_scenario(dir.path(), 2, &[SettingKind::Baseline], 3);
    let err = run_ppl_study(&scenario.loaded).unwrap_err();
    assert!(matches!(err, ExperimentError::MissingExperiment(_)));
}

#[test]
fn ppl_study_requires_both_language_variants() {
    let dir = tempfile::tempdir().unwrap();
    let mut scenario = scripted_scenario(dir.path(), 2, &[SettingKind::Baseline], 3);
    scenario.loaded.config.datasets = vec!["ko".into()];
    run_experiment(&scenario.loaded).unwrap();
    let err = run_ppl_study(&scenario.loaded).unwrap_err();
    match err {
        ExperimentError::MissingExperiment(message) => {
            assert!(message.contains("paired language variants"), "{message}");
        }
        other => panic!("expected a missing-experiment error, got {other}"),
    }
}

#[test]
fn ppl_study_emits_the_analytic_table() {
    let dir = tempfile::tempdir().unwrap();
    let kinds = [
        SettingKind::Baseline,
        SettingKind::Transfer,
        SettingKind::Align,
    ];
    let scenario = scripted_scenario(dir.path(), 5, &kinds, 3);
    run_experiment(&scenario.loaded).unwrap();
    let study = run_ppl_study(&scenario.loaded).unwrap();

    // Unanimous disagreement: fact 1 is bilingual, facts 2-4 Korean-only,
    // fact 5 English-only.
    assert_eq!(study.counts.len(), 1);
    assert_eq!(study.counts[0].en_correct_orig_wrong, 1);
    assert_eq!(study.counts[0].en_wrong_orig_correct, 3);

    // 6 settings x 2 sides.
    assert_eq!(study.table.rows.len(), 12);
    for row in &study.table.rows {
        let expected_n = match row.side {
            PartitionSide::EnCorrectOrigWrong => 1,
            PartitionSide::EnWrongOrigCorrect => 3,
        };
        assert_eq!(row.n_items, expected_n, "row {}", row.setting.label());
        let mean = row.mean_ppl.unwrap();
        let expected = match row.setting.input_lang {
            LanguageCode::Ko => 1.0f64.exp(),
            LanguageCode::En => 2.0f64.exp(),
            other => panic!("unexpected input language {other}"),
        };
        assert!(
            (mean - expected).abs() < 1e-9,
            "row {} mean {mean}",
            row.setting.label()
        );
    }

    let csv = std::fs::read_to_string(study.dir.join("ppl.csv")).unwrap();
    assert!(csv.starts_with("partition_side,setting,n_items,mean_ppl\n"));
    let counts = std::fs::read_to_string(study.dir.join("counts.csv")).unwrap();
    assert!(counts.contains("EN vs KO,1,3"));
}
