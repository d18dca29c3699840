//! Experiment orchestration: configuration, resumable cell scheduling,
//! and report emission.

mod config;
mod ppl_runner;
mod runner;

use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, LoadedConfig, Mode};
pub use ppl_runner::{run_ppl_study, run_ppl_study_with, PplStudyOutcome};
pub use runner::{
    regenerate_reports, run_experiment, run_experiment_with_provider, Cell, CellFailure,
    ExperimentOutcome,
};

use crate::analysis::MarkerError;
use crate::dataset::ManifestError;
use crate::metrics::MetricsError;
use crate::ppl::PplError;
use crate::prompt::{PromptError, TemplateError};
use crate::provider::{ProviderConfigError, ProviderError, ScriptedSpecError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Marker(#[from] MarkerError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    ScriptedSpec(#[from] ScriptedSpecError),
    #[error(transparent)]
    ProviderConfig(#[from] ProviderConfigError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Ppl(#[from] PplError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path} is corrupt: {reason}")]
    Corrupt { path: String, reason: String },
    #[error("missing experiment: {0}")]
    MissingExperiment(String),
    #[error("item id {0:?} appears in more than one configured dataset")]
    DuplicateItemId(String),
}
