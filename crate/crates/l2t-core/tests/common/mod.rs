//! Shared fixtures for integration tests.
#![allow(dead_code)] // not every test binary uses every fixture

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use l2t_core::dataset::write_dataset;
use l2t_core::experiment::{ExperimentConfig, LoadedConfig, Mode};
use l2t_core::prompt::PromptTemplateSet;
use l2t_core::provider::ScriptedModelSpec;
use l2t_core::types::{AnswerLetter, LanguageCode, MCQItem, SettingKind};

/// The operator-editable template directory at the workspace root.
pub fn templates_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../templates")
}

pub fn load_templates() -> PromptTemplateSet {
    PromptTemplateSet::load(templates_dir()).expect("workspace templates load")
}

pub fn options(texts: &[&str]) -> BTreeMap<AnswerLetter, String> {
    AnswerLetter::ALL
        .iter()
        .zip(texts)
        .map(|(l, t)| (*l, t.to_string()))
        .collect()
}

/// `count` Korean questions with fixed golds plus their English
/// translations, paired in both directions.
pub fn paired_items(count: usize) -> (Vec<MCQItem>, Vec<MCQItem>) {
    let golds = [
        AnswerLetter::B,
        AnswerLetter::C,
        AnswerLetter::D,
        AnswerLetter::B,
        AnswerLetter::C,
    ];
    let mut korean = Vec::new();
    let mut english = Vec::new();
    for i in 0..count {
        let id = format!("q{}", i + 1);
        let en_id = format!("{id}-en");
        let gold = golds[i % golds.len()];
        korean.push(
            MCQItem::new(
                &id,
                "CLIcK",
                Some("History".into()),
                LanguageCode::Ko,
                format!("{}번 질문: 경복궁은 어느 도시에 있는가?", i + 1),
                options(&["부산이다", "서울이다", "대구이다", "인천이다"]),
                gold,
                Some(en_id.clone()),
            )
            .unwrap(),
        );
        english.push(
            MCQItem::new(
                &en_id,
                "CLIcK",
                Some("History".into()),
                LanguageCode::En,
                format!("Question {}: In which city is Gyeongbokgung?", i + 1),
                options(&["It is Busan", "It is Seoul", "It is Daegu", "It is Incheon"]),
                gold,
                Some(id),
            )
            .unwrap(),
        );
    }
    (korean, english)
}

/// A fully written scripted-mode experiment in a directory: datasets,
/// manifest, scripted spec, and the loaded config pointing at them.
pub struct Scenario {
    pub loaded: LoadedConfig,
}

/// Write all experiment inputs under `dir` and return the loaded config.
///
/// Knowledge: every Korean fact is stored in Korean; fact 1 is stored in
/// English as well; the last fact is stored only in English. Distractor A.
pub fn scripted_scenario(
    dir: &Path,
    item_count: usize,
    kinds: &[SettingKind],
    run_count: u32,
) -> Scenario {
    let (korean, english) = paired_items(item_count);
    write_dataset(&dir.join("ko.jsonl"), &korean).unwrap();
    write_dataset(&dir.join("en.jsonl"), &english).unwrap();
    std::fs::write(
        dir.join("manifest.toml"),
        r#"
[datasets.ko]
path = "ko.jsonl"
language = "KO"

[datasets.en]
path = "en.jsonl"
language = "EN"
"#,
    )
    .unwrap();

    let mut knowledge: Vec<(String, LanguageCode)> = Vec::new();
    for (i, item) in korean.iter().enumerate() {
        let last = i + 1 == item_count;
        if !last {
            knowledge.push((item.id().to_string(), LanguageCode::Ko));
        }
        if i == 0 || last {
            knowledge.push((item.id().to_string(), LanguageCode::En));
        }
    }
    let mut spec = ScriptedModelSpec::new(knowledge, AnswerLetter::A);
    spec.logprob_default = -2.0;
    spec.logprob_per_language.insert(LanguageCode::Ko, -1.0);
    std::fs::write(
        dir.join("scripted.json"),
        serde_json::to_vec_pretty(&spec).unwrap(),
    )
    .unwrap();

    let config = ExperimentConfig {
        manifest: "manifest.toml".into(),
        datasets: vec!["ko".into(), "en".into()],
        mode: Mode::Scripted,
        scripted_spec: Some("scripted.json".into()),
        provider_config: None,
        templates_dir: templates_dir(),
        kinds: kinds.to_vec(),
        thought_langs: vec![LanguageCode::En, LanguageCode::Ko],
        run_count,
        concurrency: 2,
        cache_dir: "cache".into(),
        output_dir: "out".into(),
        seeds: vec![],
        max_new_tokens: None,
        collapse_runs: false,
    };
    Scenario {
        loaded: LoadedConfig::from_parts(config, dir),
    }
}
