//! Accuracy, input-language ratio, aggregates, deltas, and the all-runs
//! consistency partition.

mod consistency;
mod report;
mod summary;

use thiserror::Error;

pub use consistency::{consistency_partition, ConsistencyPartition, RunGrid};
pub use report::{
    accuracy_csv, accuracy_markdown, consistency_csv, consistency_markdown, percent, runs_csv,
    ConsistencyRow,
};
pub use summary::{aggregate, delta_vs_baseline, summarize_run, AggregateCell, RunSummary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("cannot summarize an empty run")]
    EmptyRun,
    #[error("transcripts mix settings or run indices")]
    MixedRun,
    #[error("cannot aggregate zero runs")]
    EmptyAggregate,
    #[error("aggregated runs mix settings")]
    MixedAggregate,
    #[error("correctness grids disagree: {0}")]
    GridMismatch(String),
}
