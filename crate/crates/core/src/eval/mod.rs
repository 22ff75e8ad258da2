//! Scoring: correctness of one candidate, pass@k curves over trials,
//! out-of-vocabulary classification and a resolve-probability density fit.

mod density;
mod oov;
mod report;

pub use density::{expected_accuracy, fit_density, DensityFit, DensityModel, FitOptions, NEAR_EPSILON};
pub use oov::{classify_oov, identifier_tokens, FeasibilityRecord, OovTable};
pub use report::{curve_csv, DensityReport, ExampleReport, RunReport};

use crate::model::EvalRecord;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("record {id:?} has {got} trials, fewer than k = {k}")]
    TooFewTrials { id: String, got: usize, k: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("observed curve decreases at k = {k} ({prev} -> {next})")]
    NonMonotone { k: usize, prev: f64, next: f64 },
    #[error("observed accuracy {value} at k = {k} is outside [0, 1]")]
    OutOfRange { k: usize, value: f64 },
    #[error("example {0:?} has no ground-truth fix")]
    MissingGroundTruth(String),
    #[error("unknown evaluation mode {0:?}")]
    UnknownMode(String),
    #[error("invalid fit options: {0}")]
    Options(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// The truth's trimmed first line is a prefix of the candidate's.
    #[default]
    PrefixFirstLine,
    /// Same line count, lines equal up to trailing whitespace.
    ExactMultiline,
}

impl EvalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalMode::PrefixFirstLine => "prefix_first_line",
            EvalMode::ExactMultiline => "exact_multiline",
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvalMode {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "prefix_first_line" => Ok(EvalMode::PrefixFirstLine),
            "exact_multiline" => Ok(EvalMode::ExactMultiline),
            _ => Err(EvalError::UnknownMode(s.to_string())),
        }
    }
}

fn first_line(s: &str) -> &str {
    s.split('\n').next().unwrap_or("").trim()
}

/// An empty ground truth never matches.
pub fn is_correct(candidate: &str, ground_truth: &str, mode: EvalMode) -> bool {
    if ground_truth.trim().is_empty() {
        return false;
    }
    match mode {
        EvalMode::PrefixFirstLine => first_line(candidate).starts_with(first_line(ground_truth)),
        EvalMode::ExactMultiline => {
            let a: Vec<&str> = candidate.lines().map(str::trim_end).collect();
            let b: Vec<&str> = ground_truth.lines().map(str::trim_end).collect();
            a == b
        }
    }
}

/// Number of examples solved within the first k trials, for k = 1..=K.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccuracyCurve {
    pub solved: Vec<usize>,
    pub total: usize,
}

impl AccuracyCurve {
    pub fn max_k(&self) -> usize {
        self.solved.len()
    }

    /// Accuracy at 1-based `k`; 0 for an empty record set.
    pub fn at(&self, k: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.solved[k - 1] as f64 / self.total as f64
        }
    }

    pub fn acc(&self) -> Vec<f64> {
        (1..=self.max_k()).map(|k| self.at(k)).collect()
    }
}

/// pass@k over raw trials: an example counts as solved at k if any of its
/// first k trials succeeded.
pub fn accuracy_curve(records: &[EvalRecord], max_k: usize) -> Result<AccuracyCurve, EvalError> {
    if max_k == 0 {
        return Err(EvalError::ZeroK);
    }
    let mut solved = vec![0; max_k];
    for r in records {
        if r.trial_outcomes.len() < max_k {
            return Err(EvalError::TooFewTrials {
                id: r.example_id.clone(),
                got: r.trial_outcomes.len(),
                k: max_k,
            });
        }
        if let Some(first) = r.resolved_at().filter(|&t| t <= max_k) {
            solved[first - 1..].iter_mut().for_each(|s| *s += 1);
        }
    }
    Ok(AccuracyCurve {
        solved,
        total: records.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(outcomes: &[bool]) -> EvalRecord {
        EvalRecord::new("r", outcomes.to_vec(), vec![String::new(); outcomes.len()]).unwrap()
    }

    #[test]
    fn prefix_mode() {
        let m = EvalMode::PrefixFirstLine;
        assert!(is_correct("foo(); // note", "foo();", m));
        assert!(!is_correct("fo", "foo();", m));
        assert!(is_correct("  foo();  \nbar", " foo();", m));
        assert!(!is_correct("anything", "  ", m));
    }

    #[test]
    fn exact_mode() {
        let m = EvalMode::ExactMultiline;
        assert!(is_correct("a  \nb\n", "a\nb", m));
        assert!(!is_correct("a\nb\nc", "a\nb", m));
        assert!(!is_correct(" a\nb", "a\nb", m));
    }

    #[test]
    fn half_solved_curve() {
        let t = [true, false, false];
        let f = [false, false, false];
        let c = accuracy_curve(&[record(&t), record(&f)], 3).unwrap();
        assert_eq!(c.acc(), [0.5, 0.5, 0.5]);
        let c = accuracy_curve(&[record(&f)], 3).unwrap();
        assert_eq!(c.acc(), [0.0; 3]);
        let late = [false, false, true];
        assert_eq!(accuracy_curve(&[record(&late)], 3).unwrap().solved, [0, 0, 1]);
    }

    #[test]
    fn short_record_is_input_error() {
        assert!(matches!(
            accuracy_curve(&[record(&[true])], 2),
            Err(EvalError::TooFewTrials { .. })
        ));
        assert!(accuracy_curve(&[], 0).is_err());
    }
}
