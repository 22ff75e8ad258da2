//! Prompt rendering and assembly.
//!
//! A prompt is a sequence of question/answer shots followed by one query that
//! ends at the answer cue. For semantic conflicts the query carries as many
//! upstream `--`/`++` pairs as fit the token budget.

mod render;
mod select;
mod shots;
mod tokens;

pub use render::{
    build_query, parse_semantic, parse_textual, render_pair, render_shot, SemanticBlock, TextualBlock,
};
pub use select::{assemble, select_pairs, DEFAULT_BUDGET};
pub use shots::{app_url_shot, random_shots, representative_shots, split_shots, ShotSplit};
pub use tokens::{TokenCounter, TokenEstimator, WordPunctCounter};

use crate::model::{ConflictDescription, TextualConflict};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("example {0:?} has no ground truth to render as a shot")]
    MissingGroundTruth(String),
    #[error("format {0} cannot render this kind of example")]
    FormatMismatch(PromptFormat),
    #[error("first pair needs {needed} tokens, {overflow} over the budget of {budget}")]
    Overflow { needed: usize, budget: usize, overflow: usize },
    #[error("shots and query alone need {needed} tokens, over the budget of {budget}")]
    ShotsOverflow { needed: usize, budget: usize },
    #[error("prompt line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unknown {kind} {value:?}")]
    UnknownName { kind: &'static str, value: String },
    #[error("shot fixture {0:?} not found")]
    UnknownShot(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptFormat {
    SemanticDiff,
    ConflictMarkers,
    MergeTuple,
}

impl PromptFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptFormat::SemanticDiff => "semantic_diff",
            PromptFormat::ConflictMarkers => "conflict_markers",
            PromptFormat::MergeTuple => "merge_tuple",
        }
    }

    pub fn answer_cue(self) -> &'static str {
        match self {
            PromptFormat::MergeTuple => "Answers:\n",
            _ => "Answer:\n",
        }
    }

    pub fn is_textual(self) -> bool {
        self != PromptFormat::SemanticDiff
    }
}

impl fmt::Display for PromptFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PromptFormat {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [PromptFormat::SemanticDiff, PromptFormat::ConflictMarkers, PromptFormat::MergeTuple]
            .into_iter()
            .find(|f| f.as_str() == s.replace('-', "_"))
            .ok_or_else(|| PromptError::UnknownName {
                kind: "prompt format",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    FirstPair,
    MaximalPlain,
    MaximalDistinct,
}

impl SelectionStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionStrategy::FirstPair => "first_pair",
            SelectionStrategy::MaximalPlain => "maximal_plain",
            SelectionStrategy::MaximalDistinct => "maximal_distinct",
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SelectionStrategy {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            SelectionStrategy::FirstPair,
            SelectionStrategy::MaximalPlain,
            SelectionStrategy::MaximalDistinct,
        ]
        .into_iter()
        .find(|f| f.as_str() == s.replace('-', "_"))
        .ok_or_else(|| PromptError::UnknownName {
            kind: "selection strategy",
            value: s.to_string(),
        })
    }
}

/// One question/answer example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shot {
    pub question: String,
    pub answer: String,
}

impl Shot {
    pub fn text(&self) -> String {
        format!("{}{}", self.question, self.answer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub text: String,
    pub token_estimate: usize,
    pub shots_used: usize,
    pub pairs_used: usize,
}

/// Something that can be rendered as a shot or a query.
#[derive(Debug, Clone, Copy)]
pub enum Example<'a> {
    Semantic(&'a ConflictDescription),
    Textual(&'a TextualConflict),
}

impl<'a> From<&'a ConflictDescription> for Example<'a> {
    fn from(d: &'a ConflictDescription) -> Self {
        Example::Semantic(d)
    }
}

impl<'a> From<&'a TextualConflict> for Example<'a> {
    fn from(c: &'a TextualConflict) -> Self {
        Example::Textual(c)
    }
}
