//! The all-runs consistency partition over paired items.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Per-item correctness across runs, keyed by the pair identifier.
pub type RunGrid = BTreeMap<String, Vec<bool>>;

/// Items answered unanimously one way in English and unanimously the
/// other way in the original language, across every run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyPartition {
    pub en_correct_orig_wrong: BTreeSet<String>,
    pub en_wrong_orig_correct: BTreeSet<String>,
}

impl ConsistencyPartition {
    pub fn total(&self) -> usize {
        self.en_correct_orig_wrong.len() + self.en_wrong_orig_correct.len()
    }
}

/// Partition paired items by unanimous disagreement between the two
/// language conditions.
///
/// An item qualifies only when it is correct in every English run and
/// wrong in every original-language run, or the reverse. Anything mixed
/// in either condition is excluded. Both grids must cover the same item
/// ids with the same per-item run count.
pub fn consistency_partition(
    en_grid: &RunGrid,
    orig_grid: &RunGrid,
) -> Result<ConsistencyPartition, MetricsError> {
    if en_grid.len() != orig_grid.len() || en_grid.keys().any(|id| !orig_grid.contains_key(id)) {
        return Err(MetricsError::GridMismatch(
            "the two grids cover different item sets".into(),
        ));
    }
    let mut partition = ConsistencyPartition::default();
    for (id, en_runs) in en_grid {
        let orig_runs = &orig_grid[id];
        if en_runs.is_empty() || en_runs.len() != orig_runs.len() {
            return Err(MetricsError::GridMismatch(format!(
                "item {id} has {} EN runs and {} original-language runs",
                en_runs.len(),
                orig_runs.len()
            )));
        }
        let en_all_correct = en_runs.iter().all(|&c| c);
        let en_all_wrong = en_runs.iter().all(|&c| !c);
        let orig_all_correct = orig_runs.iter().all(|&c| c);
        let orig_all_wrong = orig_runs.iter().all(|&c| !c);
        if en_all_correct && orig_all_wrong {
            partition.en_correct_orig_wrong.insert(id.clone());
        } else if en_all_wrong && orig_all_correct {
            partition.en_wrong_orig_correct.insert(id.clone());
        }
    }
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(entries: &[(&str, &[bool])]) -> RunGrid {
        entries
            .iter()
            .map(|(id, runs)| (id.to_string(), runs.to_vec()))
            .collect()
    }

    #[test]
    fn unanimous_disagreement_is_partitioned() {
        let en = grid(&[("q1", &[true, true, true]), ("q2", &[false, false, false])]);
        let orig = grid(&[("q1", &[false, false, false]), ("q2", &[true, true, true])]);
        let partition = consistency_partition(&en, &orig).unwrap();
        assert!(partition.en_correct_orig_wrong.contains("q1"));
        assert!(partition.en_wrong_orig_correct.contains("q2"));
        assert!(partition
            .en_correct_orig_wrong
            .is_disjoint(&partition.en_wrong_orig_correct));
    }

    #[test]
    fn non_unanimous_items_are_excluded() {
        let en = grid(&[("q1", &[true, true, false])]);
        let orig = grid(&[("q1", &[false, false, false])]);
        let partition = consistency_partition(&en, &orig).unwrap();
        assert_eq!(partition.total(), 0);
    }

    #[test]
    fn agreement_in_both_conditions_is_excluded() {
        let en = grid(&[("q1", &[true, true, true])]);
        let orig = grid(&[("q1", &[true, true, true])]);
        let partition = consistency_partition(&en, &orig).unwrap();
        assert_eq!(partition.total(), 0);
    }

    #[test]
    fn swapping_arguments_swaps_the_sets() {
        let en = grid(&[
            ("q1", &[true, true, true]),
            ("q2", &[false, false, false]),
            ("q3", &[true, false, true]),
        ]);
        let orig = grid(&[
            ("q1", &[false, false, false]),
            ("q2", &[true, true, true]),
            ("q3", &[true, true, true]),
        ]);
        let forward = consistency_partition(&en, &orig).unwrap();
        let backward = consistency_partition(&orig, &en).unwrap();
        assert_eq!(
            forward.en_correct_orig_wrong,
            backward.en_wrong_orig_correct
        );
        assert_eq!(
            forward.en_wrong_orig_correct,
            backward.en_correct_orig_wrong
        );
    }

    #[test]
    fn differing_item_sets_are_a_grid_mismatch() {
        let en = grid(&[("q1", &[true])]);
        let orig = grid(&[("q2", &[true])]);
        assert!(matches!(
            consistency_partition(&en, &orig).unwrap_err(),
            MetricsError::GridMismatch(_)
        ));
    }

    #[test]
    fn differing_run_counts_are_a_grid_mismatch() {
        let en = grid(&[("q1", &[true, true])]);
        let orig = grid(&[("q1", &[true, true, true])]);
        assert!(matches!(
            consistency_partition(&en, &orig).unwrap_err(),
            MetricsError::GridMismatch(_)
        ));
    }
}
