//! Command-line front end: run experiments, the perplexity study, corpus
//! construction, and report regeneration.
//!
//! Exit codes: 0 success, 1 partial failure, 2 configuration error.
//! Credentials are taken from environment variables named in the
//! provider config, never from flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use l2t_core::corpus::{
    build_corpus, read_statements, write_corpus, CorpusConfig, CorpusKind, PrefixPosition,
};
use l2t_core::experiment::{
    regenerate_reports, run_experiment, run_ppl_study, ExperimentError, LoadedConfig,
};
use l2t_core::provider::{DictionaryTranslator, Translator};
use l2t_core::types::LanguageCode;

#[derive(Parser)]
#[command(
    name = "l2t",
    version,
    about = "Cross-lingual prompting evaluation harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the (items x settings x runs) evaluation grid.
    Run {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
    },
    /// Consistency-filtered perplexity study over a completed experiment.
    PplStudy {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build one continued-pretraining corpus configuration.
    BuildCorpus {
        /// One statement per line.
        #[arg(long)]
        input: PathBuf,
        /// orig-only | translated-en | l2t-prefix-orig | l2t-prefix-en
        #[arg(long)]
        kind: String,
        /// Source language code (EN, ZH, KO, AR).
        #[arg(long)]
        language: String,
        #[arg(long)]
        output: PathBuf,
        /// Override the thought prefix text.
        #[arg(long)]
        prefix: Option<String>,
        /// Attach the prefix after the statement instead of before it.
        #[arg(long)]
        append_prefix: bool,
        /// Phrase-table JSON for the translated configuration.
        #[arg(long)]
        dictionary: Option<PathBuf>,
    },
    /// Regenerate reports from persisted transcripts.
    Report {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_PARTIAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn config_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_CONFIG)
}

/// Configuration-shaped failures exit 2; runtime failures exit 1.
fn experiment_exit(err: ExperimentError) -> ExitCode {
    let code = match err {
        ExperimentError::Config(_)
        | ExperimentError::Template(_)
        | ExperimentError::Marker(_)
        | ExperimentError::Manifest(_)
        | ExperimentError::ScriptedSpec(_)
        | ExperimentError::ProviderConfig(_)
        | ExperimentError::MissingExperiment(_)
        | ExperimentError::DuplicateItemId(_) => EXIT_CONFIG,
        _ => EXIT_PARTIAL,
    };
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn cmd_run(config: PathBuf) -> ExitCode {
    let loaded = match LoadedConfig::load(&config) {
        Ok(loaded) => loaded,
        Err(err) => return config_error(err),
    };
    match run_experiment(&loaded) {
        Ok(outcome) => {
            println!(
                "{}/{} cells complete ({} fresh provider calls)",
                outcome.completed_cells, outcome.total_cells, outcome.fresh_provider_calls
            );
            for path in &outcome.report_paths {
                println!("report: {}", path.display());
            }
            if outcome.is_complete() {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "{} cells failed; see {}",
                    outcome.failures.len(),
                    outcome.dir.join("failures.json").display()
                );
                ExitCode::from(EXIT_PARTIAL)
            }
        }
        Err(err) => experiment_exit(err),
    }
}

fn cmd_ppl_study(config: PathBuf) -> ExitCode {
    let loaded = match LoadedConfig::load(&config) {
        Ok(loaded) => loaded,
        Err(err) => return config_error(err),
    };
    match run_ppl_study(&loaded) {
        Ok(outcome) => {
            if outcome.table.dropped > 0 {
                eprintln!("{} items dropped for missing traces", outcome.table.dropped);
            }
            for path in &outcome.report_paths {
                println!("report: {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => experiment_exit(err),
    }
}

fn parse_kind(kind: &str) -> Option<CorpusKind> {
    match kind {
        "orig-only" => Some(CorpusKind::OrigOnly),
        "translated-en" => Some(CorpusKind::TranslatedEn),
        "l2t-prefix-orig" => Some(CorpusKind::L2TPrefixOrig),
        "l2t-prefix-en" => Some(CorpusKind::L2TPrefixEn),
        _ => None,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_build_corpus(
    input: PathBuf,
    kind: String,
    language: String,
    output: PathBuf,
    prefix: Option<String>,
    append_prefix: bool,
    dictionary: Option<PathBuf>,
) -> ExitCode {
    let Some(kind) = parse_kind(&kind) else {
        return config_error(format!("unknown corpus kind {kind:?}"));
    };
    let Some(language) = LanguageCode::parse(&language) else {
        return config_error(format!("unknown language {language:?}"));
    };
    let mut config = CorpusConfig::new(kind, language);
    if let Some(prefix) = prefix {
        config = config.with_prefix(prefix);
    }
    if append_prefix {
        config.prefix_position = PrefixPosition::Append;
    }
    let statements = match read_statements(&input) {
        Ok(lines) => lines,
        Err(err) => return config_error(err),
    };
    let translator: Option<DictionaryTranslator> = match &dictionary {
        Some(path) => match DictionaryTranslator::load(path) {
            Ok(dict) => Some(dict),
            Err(err) => return config_error(err),
        },
        None => None,
    };
    let translator_ref = translator.as_ref().map(|t| t as &dyn Translator);
    match build_corpus(&statements, &config, translator_ref) {
        Ok(lines) => match write_corpus(&output, &lines, &config) {
            Ok(manifest) => {
                println!(
                    "wrote {} lines to {} (sha256 {})",
                    manifest.count,
                    output.display(),
                    manifest.sha256
                );
                ExitCode::SUCCESS
            }
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(EXIT_PARTIAL)
            }
        },
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}

fn cmd_report(config: PathBuf) -> ExitCode {
    let loaded = match LoadedConfig::load(&config) {
        Ok(loaded) => loaded,
        Err(err) => return config_error(err),
    };
    match regenerate_reports(&loaded) {
        Ok(paths) => {
            for path in paths {
                println!("report: {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => experiment_exit(err),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => cmd_run(config),
        Command::PplStudy { config } => cmd_ppl_study(config),
        Command::BuildCorpus {
            input,
            kind,
            language,
            output,
            prefix,
            append_prefix,
            dictionary,
        } => cmd_build_corpus(
            input,
            kind,
            language,
            output,
            prefix,
            append_prefix,
            dictionary,
        ),
        Command::Report { config } => cmd_report(config),
    }
}
