use super::{prompt_sha256, BackendError, CompletionBackend, CompletionParams};
use crate::prompt::{parse_semantic, parse_textual, PromptFormat, SemanticBlock};
use crate::stringmerge::{apply_rules, learn_rules};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::BufRead;

/// One line of a replay fixture file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub prompt_sha256: String,
    pub completions: Vec<String>,
}

/// Serves recorded completions keyed by prompt hash.
///
/// Trial `t` receives `completions[t % len]`, so concurrent sampling stays
/// reproducible without shared cursor state.
#[derive(Debug, Clone, Default)]
pub struct ReplayBackend {
    fixtures: HashMap<String, Vec<String>>,
}

impl ReplayBackend {
    pub fn new(records: impl IntoIterator<Item = ReplayRecord>) -> Self {
        let mut fixtures = HashMap::new();
        for r in records {
            fixtures.insert(r.prompt_sha256, r.completions);
        }
        Self { fixtures }
    }

    /// Reads JSON-lines records; blank lines are ignored.
    pub fn from_jsonl<R: BufRead>(reader: R) -> Result<Self, BackendError> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| BackendError::Config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ReplayRecord = serde_json::from_str(&line)
                .map_err(|e| BackendError::Config(format!("replay line {}: {e}", i + 1)))?;
            if record.completions.is_empty() {
                return Err(BackendError::Config(format!("replay line {}: no completions", i + 1)));
            }
            records.push(record);
        }
        Ok(Self::new(records))
    }

    pub fn len(&self) -> usize {
        self.fixtures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixtures.is_empty()
    }
}

impl CompletionBackend for ReplayBackend {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, BackendError> {
        let sha = prompt_sha256(prompt);
        let completions = self.fixtures.get(&sha).ok_or(BackendError::MissingFixture(sha))?;
        Ok(completions[params.trial % completions.len()].clone())
    }
}

fn query_block(prompt: &str) -> Option<SemanticBlock> {
    parse_semantic(prompt).ok()?.pop()
}

/// Emulates a model that solves exactly the StringMerge-solvable cases:
/// rules learned from the query's pairs are applied to its conflict line.
///
/// The completion runs past the answer into the next `Question:` so that
/// stop-marker handling is exercised. Unparseable prompts yield `""`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleMockBackend;

impl CompletionBackend for RuleMockBackend {
    fn complete(&self, prompt: &str, _: &CompletionParams) -> Result<String, BackendError> {
        let Some(block) = query_block(prompt) else {
            return Ok(String::new());
        };
        let rules = learn_rules(&block.pairs);
        Ok(format!("+{}\n\nQuestion:", apply_rules(&block.conflict, &rules)))
    }
}

/// Returns the conflicting input unchanged: the `-` line of a semantic query,
/// or variant A of a textual one.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoBackend;

impl CompletionBackend for EchoBackend {
    fn complete(&self, prompt: &str, _: &CompletionParams) -> Result<String, BackendError> {
        if let Some(block) = query_block(prompt) {
            return Ok(format!("+{}\n", block.conflict));
        }
        for format in [PromptFormat::ConflictMarkers, PromptFormat::MergeTuple] {
            if let Some(block) = parse_textual(format, prompt).ok().and_then(|mut b| b.pop()) {
                return Ok(block.variant_a.join("\n") + "\n");
            }
        }
        Ok(String::new())
    }
}
