//! Shared domain types: conflict descriptions curated from history, textual
//! conflicts taken from benchmark datasets, and per-example evaluation records.

mod description;
mod textual;

pub use description::{load_conflict_descriptions, save_conflict_descriptions};
pub use textual::{
    load_marker_file, load_textual_conflicts, load_tuple_dir, save_marker_file, save_tuple_dir,
    TextualSource,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors raised while loading or validating model values.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("description {index}: missing required key \"{key}\"")]
    MissingKey { index: usize, key: &'static str },
    #[error("description {index}: {reason}")]
    Invalid { index: usize, reason: String },
    #[error("line {line}: {reason}")]
    Marker { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid value: {0}")]
    Invariant(String),
}

/// One upstream before/after change pair.
///
/// `before` is a single line; `after` may hold several lines joined by `\n`
/// when the replacement spanned more than one added line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UpstreamChange {
    #[serde(rename = "Before")]
    pub before: String,
    #[serde(rename = "After")]
    pub after: String,
}

impl UpstreamChange {
    pub fn new(before: impl Into<String>, after: impl Into<String>) -> Result<Self, ModelError> {
        let change = Self {
            before: before.into(),
            after: after.into(),
        };
        change.validate()?;
        Ok(change)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.before.trim().is_empty() {
            return Err(ModelError::Invariant("upstream Before is blank".into()));
        }
        if self.before.contains('\n') {
            return Err(ModelError::Invariant(
                "upstream Before must be a single line".into(),
            ));
        }
        if self.after.trim().is_empty() {
            return Err(ModelError::Invariant("upstream After is blank".into()));
        }
        Ok(())
    }

    /// First line of `after`; patterns and rewrite rules are computed against it.
    pub fn after_first_line(&self) -> &str {
        self.after.split('\n').next().unwrap_or("")
    }
}

/// Clang diagnostic ids that signal a semantic merge conflict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorType {
    ErrNoMember,
    ErrNoMemberSuggest,
    ErrUndeclaredVarUseSuggest,
    ErrUndeclaredUseSuggest,
    #[serde(other)]
    Other,
}

impl ErrorType {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorType::ErrNoMember => "err_no_member",
            ErrorType::ErrNoMemberSuggest => "err_no_member_suggest",
            ErrorType::ErrUndeclaredVarUseSuggest => "err_undeclared_var_use_suggest",
            ErrorType::ErrUndeclaredUseSuggest => "err_undeclared_use_suggest",
            ErrorType::Other => "other",
        }
    }
}

impl FromStr for ErrorType {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "err_no_member" => ErrorType::ErrNoMember,
            "err_no_member_suggest" => ErrorType::ErrNoMemberSuggest,
            "err_undeclared_var_use_suggest" => ErrorType::ErrUndeclaredVarUseSuggest,
            "err_undeclared_use_suggest" => ErrorType::ErrUndeclaredUseSuggest,
            _ => ErrorType::Other,
        })
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompilerDiagnostic {
    #[serde(rename = "ErrorType", alias = "error_type")]
    pub error_type: ErrorType,
    #[serde(rename = "Message", alias = "message")]
    pub message: String,
    #[serde(rename = "File", alias = "file")]
    pub file: String,
    /// 1-based.
    #[serde(rename = "Line", alias = "line")]
    pub line: u32,
}

/// A self-contained record of one semantic merge conflict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictDescription {
    pub id: String,
    pub upstream_changes: Vec<UpstreamChange>,
    pub downstream_conflict: String,
    pub downstream_fix: Option<String>,
    pub diagnostic: Option<CompilerDiagnostic>,
}

impl ConflictDescription {
    pub fn validate(&self) -> Result<(), ModelError> {
        for change in &self.upstream_changes {
            change.validate()?;
        }
        if self.downstream_conflict.contains('\n') {
            return Err(ModelError::Invariant(
                "DownstreamConflict must be a single line".into(),
            ));
        }
        if let Some(fix) = &self.downstream_fix {
            if fix.contains('\n') {
                return Err(ModelError::Invariant(
                    "DownstreamFix must be a single line".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn fix(&self) -> Option<&str> {
        self.downstream_fix.as_deref()
    }
}

/// A textual conflict from a benchmark: two variants, an optional base and
/// the developer's resolution.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextualConflict {
    pub id: String,
    pub base: Vec<String>,
    pub variant_a: Vec<String>,
    pub variant_b: Vec<String>,
    pub resolution: Vec<String>,
}

impl TextualConflict {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.variant_a.is_empty() && self.variant_b.is_empty() {
            return Err(ModelError::Invariant(format!(
                "textual conflict {}: both variants are empty",
                self.id
            )));
        }
        Ok(())
    }

    /// Number of conflicting lines on both sides.
    pub fn merge_size(&self) -> usize {
        self.variant_a.len() + self.variant_b.len()
    }
}

/// Outcomes of every trial for one example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub example_id: String,
    pub trial_outcomes: Vec<bool>,
    pub candidates: Vec<String>,
}

impl EvalRecord {
    pub fn new(
        example_id: impl Into<String>,
        trial_outcomes: Vec<bool>,
        candidates: Vec<String>,
    ) -> Result<Self, ModelError> {
        if trial_outcomes.is_empty() || trial_outcomes.len() != candidates.len() {
            return Err(ModelError::Invariant(format!(
                "eval record needs matching non-empty outcomes and candidates (got {} and {})",
                trial_outcomes.len(),
                candidates.len()
            )));
        }
        Ok(Self {
            example_id: example_id.into(),
            trial_outcomes,
            candidates,
        })
    }

    /// First 1-based trial that succeeded.
    pub fn resolved_at(&self) -> Option<usize> {
        self.trial_outcomes.iter().position(|&ok| ok).map(|i| i + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upstream_change_rejects_blank_sides() {
        assert!(UpstreamChange::new("  ", "x").is_err());
        assert!(UpstreamChange::new("x", "\n").is_err());
        assert!(UpstreamChange::new("a\nb", "x").is_err());
        let multi = UpstreamChange::new("a", "b\nc").unwrap();
        assert_eq!(multi.after_first_line(), "b");
    }

    #[test]
    fn error_type_parses_known_ids() {
        assert_eq!(
            "err_no_member_suggest".parse::<ErrorType>().unwrap(),
            ErrorType::ErrNoMemberSuggest
        );
        assert_eq!("warn_unused".parse::<ErrorType>().unwrap(), ErrorType::Other);
    }

    #[test]
    fn eval_record_lengths_must_match() {
        assert!(EvalRecord::new("x", vec![], vec![]).is_err());
        assert!(EvalRecord::new("x", vec![true], vec![]).is_err());
        let rec = EvalRecord::new("x", vec![false, true], vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(rec.resolved_at(), Some(2));
    }

    #[test]
    fn textual_conflict_needs_a_variant() {
        let empty = TextualConflict {
            id: "t".into(),
            ..Default::default()
        };
        assert!(empty.validate().is_err());
    }
}
