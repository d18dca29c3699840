//! Per-run accuracy and input-language ratio, and multi-run aggregates.

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::types::{EvalTranscript, L2TSetting};
use crate::util::ordered_sum;

/// Metrics over one (setting, run) slice of transcripts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub setting: L2TSetting,
    pub run_index: u32,
    pub n_items: usize,
    /// Fraction of items answered correctly, in [0, 1].
    pub accuracy: f64,
    /// Fraction of responses detected in the input language, in [0, 1].
    pub in_ratio: f64,
}

/// Mean and spread over the runs of one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub setting: L2TSetting,
    pub n_runs: usize,
    pub n_items: usize,
    pub mean_accuracy: f64,
    /// Sample standard deviation (n-1 divisor); zero for a single run.
    pub accuracy_stddev: f64,
    pub mean_in_ratio: f64,
}

/// Summarize the transcripts of one (setting, run) cell.
///
/// Extraction failures were already scored incorrect at transcript
/// construction, so the denominator is always the full item count.
pub fn summarize_run(transcripts: &[EvalTranscript]) -> Result<RunSummary, MetricsError> {
    let first = transcripts.first().ok_or(MetricsError::EmptyRun)?;
    let setting = first.setting;
    let run_index = first.run_index;
    if transcripts
        .iter()
        .any(|t| t.setting != setting || t.run_index != run_index)
    {
        return Err(MetricsError::MixedRun);
    }
    let n_items = transcripts.len();
    let correct = transcripts.iter().filter(|t| t.correct).count();
    let in_input = transcripts
        .iter()
        .filter(|t| t.detected_lang == Some(setting.input_lang))
        .count();
    Ok(RunSummary {
        setting,
        run_index,
        n_items,
        accuracy: correct as f64 / n_items as f64,
        in_ratio: in_input as f64 / n_items as f64,
    })
}

/// Aggregate the runs of one setting into mean and sample stddev. Sums
/// run in a fixed order, so the result is bit-identical under any
/// permutation of the runs.
pub fn aggregate(runs: &[RunSummary]) -> Result<AggregateCell, MetricsError> {
    let first = runs.first().ok_or(MetricsError::EmptyAggregate)?;
    let setting = first.setting;
    if runs.iter().any(|r| r.setting != setting) {
        return Err(MetricsError::MixedAggregate);
    }
    let n = runs.len();
    let accuracies: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
    let mean_accuracy = ordered_sum(accuracies.clone()) / n as f64;
    let accuracy_stddev = if n >= 2 {
        let squares: Vec<f64> = accuracies
            .iter()
            .map(|a| (a - mean_accuracy) * (a - mean_accuracy))
            .collect();
        (ordered_sum(squares) / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mean_in_ratio = ordered_sum(runs.iter().map(|r| r.in_ratio).collect()) / n as f64;
    Ok(AggregateCell {
        setting,
        n_runs: n,
        n_items: runs.iter().map(|r| r.n_items).max().unwrap_or(0),
        mean_accuracy,
        accuracy_stddev,
        mean_in_ratio,
    })
}

/// Signed accuracy difference against a baseline cell. Callers compare
/// cells of the same input language and task.
pub fn delta_vs_baseline(cell: &AggregateCell, baseline: &AggregateCell) -> f64 {
    cell.mean_accuracy - baseline.mean_accuracy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{AnswerLetter, LanguageCode, RequestParams};

    fn transcript(
        setting: L2TSetting,
        run_index: u32,
        id: &str,
        correct: bool,
        detected: Option<LanguageCode>,
    ) -> EvalTranscript {
        let gold = AnswerLetter::A;
        let extracted = if correct {
            Some(gold)
        } else {
            Some(AnswerLetter::B)
        };
        EvalTranscript::new(
            id,
            gold,
            setting,
            run_index,
            "",
            "u",
            "r",
            extracted,
            detected,
            RequestParams::default(),
        )
    }

    fn summary(setting: L2TSetting, run_index: u32, accuracy: f64) -> RunSummary {
        RunSummary {
            setting,
            run_index,
            n_items: 100,
            accuracy,
            in_ratio: 1.0,
        }
    }

    #[test]
    fn three_of_four_correct_all_in_language() {
        let setting = L2TSetting::baseline(LanguageCode::Ko);
        let transcripts: Vec<_> = (0..4)
            .map(|i| transcript(setting, 0, &format!("q{i}"), i != 3, Some(LanguageCode::Ko)))
            .collect();
        let summary = summarize_run(&transcripts).unwrap();
        assert_eq!(summary.accuracy, 0.75);
        assert_eq!(summary.in_ratio, 1.0);
        assert_eq!(summary.n_items, 4);
    }

    #[test]
    fn empty_run_is_an_error() {
        assert!(matches!(
            summarize_run(&[]).unwrap_err(),
            MetricsError::EmptyRun
        ));
    }

    #[test]
    fn unknown_language_counts_against_in_ratio() {
        let setting = L2TSetting::baseline(LanguageCode::En);
        let transcripts = vec![
            transcript(setting, 0, "q0", true, Some(LanguageCode::En)),
            transcript(setting, 0, "q1", true, None),
        ];
        let summary = summarize_run(&transcripts).unwrap();
        assert_eq!(summary.in_ratio, 0.5);
    }

    #[test]
    fn accuracy_matches_the_integer_ratio_at_report_granularity() {
        // 611 of 1060 correct prints as 57.64 at two decimals.
        let setting = L2TSetting::baseline(LanguageCode::Zh);
        let transcripts: Vec<_> = (0..1060)
            .map(|i| {
                transcript(
                    setting,
                    0,
                    &format!("q{i}"),
                    i < 611,
                    Some(LanguageCode::Zh),
                )
            })
            .collect();
        let summary = summarize_run(&transcripts).unwrap();
        assert!((summary.accuracy - 611.0 / 1060.0).abs() < 1e-15);
        assert_eq!(format!("{:.2}", summary.accuracy * 100.0), "57.64");
    }

    #[test]
    fn mean_and_sample_stddev() {
        let setting = L2TSetting::baseline(LanguageCode::En);
        let runs = vec![
            summary(setting, 0, 0.50),
            summary(setting, 1, 0.60),
            summary(setting, 2, 0.55),
        ];
        let cell = aggregate(&runs).unwrap();
        assert!((cell.mean_accuracy - 0.55).abs() < 1e-12);
        assert!((cell.accuracy_stddev - 0.05).abs() < 1e-12);
    }

    #[test]
    fn single_run_has_zero_stddev() {
        let setting = L2TSetting::baseline(LanguageCode::En);
        let cell = aggregate(&[summary(setting, 0, 0.62)]).unwrap();
        assert_eq!(cell.mean_accuracy, 0.62);
        assert_eq!(cell.accuracy_stddev, 0.0);
    }

    #[test]
    fn identical_runs_have_zero_stddev() {
        let setting = L2TSetting::baseline(LanguageCode::En);
        let runs = vec![
            summary(setting, 0, 0.6),
            summary(setting, 1, 0.6),
            summary(setting, 2, 0.6),
        ];
        let cell = aggregate(&runs).unwrap();
        assert_eq!(cell.accuracy_stddev, 0.0);
    }

    #[test]
    fn aggregate_is_exactly_permutation_invariant() {
        let setting = L2TSetting::baseline(LanguageCode::En);
        let runs = vec![
            summary(setting, 0, 0.517),
            summary(setting, 1, 0.631),
            summary(setting, 2, 0.559),
        ];
        let reference = aggregate(&runs).unwrap();
        let permutations: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for perm in permutations {
            let shuffled: Vec<_> = perm.iter().map(|&i| runs[i].clone()).collect();
            let cell = aggregate(&shuffled).unwrap();
            assert_eq!(
                cell.mean_accuracy.to_bits(),
                reference.mean_accuracy.to_bits()
            );
            assert_eq!(
                cell.accuracy_stddev.to_bits(),
                reference.accuracy_stddev.to_bits()
            );
        }
    }

    #[test]
    fn delta_subtracts_baseline_mean() {
        let setting = L2TSetting::baseline(LanguageCode::En);
        let cell = AggregateCell {
            setting,
            n_runs: 3,
            n_items: 100,
            mean_accuracy: 0.6451,
            accuracy_stddev: 0.0,
            mean_in_ratio: 1.0,
        };
        let baseline = AggregateCell {
            mean_accuracy: 0.6287,
            ..cell.clone()
        };
        let delta = delta_vs_baseline(&cell, &baseline);
        assert!((delta - 0.0164).abs() < 1e-12);
        assert_eq!(delta_vs_baseline(&cell, &cell), 0.0);

        let other = AggregateCell {
            mean_accuracy: 0.6461,
            ..cell
        };
        assert!((delta_vs_baseline(&other, &baseline) - 0.0174).abs() < 1e-12);
    }

    #[test]
    fn mixed_settings_are_rejected() {
        let runs = vec![
            summary(L2TSetting::baseline(LanguageCode::En), 0, 0.5),
            summary(L2TSetting::baseline(LanguageCode::Ko), 1, 0.5),
        ];
        assert!(matches!(
            aggregate(&runs).unwrap_err(),
            MetricsError::MixedAggregate
        ));
    }
}
