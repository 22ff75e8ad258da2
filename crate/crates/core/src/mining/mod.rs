//! Data curation: turn version-control history plus a compiler diagnostic
//! into a [`ConflictDescription`].
//!
//! The stages are keyword extraction from the diagnostic, harvesting upstream
//! deleted lines that mention a keyword together with their replacement, and
//! locating the downstream commit that repaired the broken line.

mod curate;
mod diff;
mod keywords;

pub use curate::{collect_upstream_changes, curate, find_repair_commit, ConflictLocation, RepairCommit};
pub use diff::{parse_commit_stream, parse_unified_diff, render_commit_stream, render_unified_diff};
pub use keywords::{extract_keywords, KeywordSet};

use thiserror::Error;

#[cfg(doc)]
use crate::model::ConflictDescription;

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("line {line}: malformed hunk header {header:?}")]
    HunkHeader { line: usize, header: String },
    #[error("line {line}: hunk before any file header")]
    HunkOutsideFile { line: usize },
    #[error("line {line}: hunk body does not match its header counts")]
    TruncatedHunk { line: usize },
    #[error("line {line}: hunks are not in increasing line order")]
    HunkOrder { line: usize },
    #[error("line {line}: {reason}")]
    CommitStream { line: usize, reason: String },
    #[error("curation failed at {stage} stage: {reason}")]
    Curation { stage: CurationStage, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurationStage {
    Keywords,
    Collection,
}

impl std::fmt::Display for CurationStage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurationStage::Keywords => "keyword",
            CurationStage::Collection => "collection",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineTag {
    Context,
    Deleted,
    Added,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hunk {
    /// 1-based; 0 for an empty side.
    pub old_start: u32,
    pub new_start: u32,
    pub lines: Vec<(LineTag, String)>,
}

impl Hunk {
    /// Old-side line number of every line (added lines report the position they follow).
    fn old_line_numbers(&self) -> impl Iterator<Item = u32> + '_ {
        let mut next = self.old_start;
        self.lines.iter().map(move |(tag, _)| {
            let at = next;
            if *tag != LineTag::Added {
                next += 1;
            }
            at
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiff {
    pub path: String,
    pub hunks: Vec<Hunk>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitRecord {
    pub commit_id: String,
    /// Seconds since the epoch.
    pub timestamp: i64,
    pub diffs: Vec<FileDiff>,
    pub message: String,
}
