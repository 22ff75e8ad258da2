use super::EvalError;
use crate::model::ConflictDescription;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityRecord {
    pub example_id: String,
    /// The fix uses a token that appears nowhere in the prompt.
    pub oov_required: bool,
    pub resolved: bool,
}

/// Maximal runs of `[A-Za-z0-9_]`.
pub fn identifier_tokens(text: &str) -> HashSet<&str> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn classify_oov(
    description: &ConflictDescription,
    prompt_text: &str,
    resolved: bool,
) -> Result<FeasibilityRecord, EvalError> {
    let fix = description
        .fix()
        .ok_or_else(|| EvalError::MissingGroundTruth(description.id.clone()))?;
    let vocabulary = identifier_tokens(prompt_text);
    let oov_required = identifier_tokens(fix).iter().any(|t| !vocabulary.contains(t));
    Ok(FeasibilityRecord {
        example_id: description.id.clone(),
        oov_required,
        resolved,
    })
}

/// Resolved/unresolved counts split by whether the fix needs unseen tokens.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OovTable {
    pub oov_resolved: usize,
    pub oov_unresolved: usize,
    pub in_vocab_resolved: usize,
    pub in_vocab_unresolved: usize,
}

impl OovTable {
    pub fn add(&mut self, record: &FeasibilityRecord) {
        let cell = match (record.oov_required, record.resolved) {
            (true, true) => &mut self.oov_resolved,
            (true, false) => &mut self.oov_unresolved,
            (false, true) => &mut self.in_vocab_resolved,
            (false, false) => &mut self.in_vocab_unresolved,
        };
        *cell += 1;
    }

    pub fn total(&self) -> usize {
        self.oov_resolved + self.oov_unresolved + self.in_vocab_resolved + self.in_vocab_unresolved
    }
}

impl<'a> FromIterator<&'a FeasibilityRecord> for OovTable {
    fn from_iter<I: IntoIterator<Item = &'a FeasibilityRecord>>(iter: I) -> Self {
        let mut table = OovTable::default();
        iter.into_iter().for_each(|r| table.add(r));
        table
    }
}
