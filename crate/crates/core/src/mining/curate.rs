use super::keywords::extract_keywords;
use super::{CommitRecord, CurationStage, KeywordSet, LineTag, MiningError};
use crate::model::{CompilerDiagnostic, ConflictDescription, UpstreamChange};
use std::collections::HashSet;

/// The downstream line that fails to compile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictLocation {
    pub file: String,
    /// 1-based.
    pub line: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairCommit {
    pub commit_id: String,
    pub fix_first_line: String,
}

fn normalize_path(path: &str) -> &str {
    let path = path.strip_prefix("./").unwrap_or(path);
    path.strip_prefix("a/")
        .or_else(|| path.strip_prefix("b/"))
        .unwrap_or(path)
}

/// Every deleted line mentioning a keyword, paired with the added lines that
/// directly follow it (up to the next context or deleted line).
pub fn collect_upstream_changes(commits: &[CommitRecord], keywords: &KeywordSet) -> Vec<UpstreamChange> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for commit in commits {
        for file in &commit.diffs {
            for hunk in &file.hunks {
                for (i, (tag, text)) in hunk.lines.iter().enumerate() {
                    if *tag != LineTag::Deleted || !keywords.matches(text) {
                        continue;
                    }
                    let added: Vec<&str> = hunk.lines[i + 1..]
                        .iter()
                        .take_while(|(t, _)| *t == LineTag::Added)
                        .map(|(_, l)| l.trim())
                        .collect();
                    if added.is_empty() {
                        continue;
                    }
                    let Ok(change) = UpstreamChange::new(text.trim(), added.join("\n")) else {
                        continue;
                    };
                    if seen.insert(change.clone()) {
                        out.push(change);
                    }
                }
            }
        }
    }
    out
}

/// Earliest later commit that deletes the conflict line in the conflict file
/// and after which the diagnostic is gone.
///
/// Lines are compared with surrounding whitespace trimmed. When a commit
/// deletes the line more than once, the occurrence nearest the reported line
/// number wins. The fix is the first added line following the deletion,
/// falling back to the first added line of the hunk.
pub fn find_repair_commit<F>(
    conflict: &ConflictLocation,
    later_commits: &[CommitRecord],
    mut diagnostic_absent: F,
) -> Option<RepairCommit>
where
    F: FnMut(&str) -> bool,
{
    let target = conflict.text.trim();
    let file = normalize_path(&conflict.file);
    for commit in later_commits {
        let mut best: Option<(u32, String)> = None;
        for diff in commit.diffs.iter().filter(|d| normalize_path(&d.path) == file) {
            for hunk in &diff.hunks {
                let numbers: Vec<u32> = hunk.old_line_numbers().collect();
                for (i, (tag, text)) in hunk.lines.iter().enumerate() {
                    if *tag != LineTag::Deleted || text.trim() != target {
                        continue;
                    }
                    let following = hunk.lines[i + 1..]
                        .iter()
                        .take_while(|(t, _)| *t != LineTag::Context)
                        .find(|(t, _)| *t == LineTag::Added);
                    let fix = following
                        .or_else(|| hunk.lines.iter().find(|(t, _)| *t == LineTag::Added))
                        .map(|(_, l)| l.trim().to_string());
                    let Some(fix) = fix else { continue };
                    let distance = numbers[i].abs_diff(conflict.line);
                    if best.as_ref().is_none_or(|(d, _)| distance < *d) {
                        best = Some((distance, fix));
                    }
                }
            }
        }
        if let Some((_, fix_first_line)) = best {
            if diagnostic_absent(&commit.commit_id) {
                return Some(RepairCommit {
                    commit_id: commit.commit_id.clone(),
                    fix_first_line,
                });
            }
        }
    }
    None
}

/// Keyword extraction, upstream harvesting and repair lookup for one conflict.
///
/// `upstream` is the history merged into the fork; `later` holds downstream
/// commits after the break, oldest first. A missing repair commit leaves
/// `downstream_fix` empty rather than failing.
pub fn curate<F>(
    id: impl Into<String>,
    upstream: &[CommitRecord],
    later: &[CommitRecord],
    diagnostic: &CompilerDiagnostic,
    location: &ConflictLocation,
    diagnostic_absent: F,
) -> Result<ConflictDescription, MiningError>
where
    F: FnMut(&str) -> bool,
{
    let keywords = extract_keywords(diagnostic);
    if keywords.is_empty() {
        return Err(MiningError::Curation {
            stage: CurationStage::Keywords,
            reason: format!("no quoted symbol in {:?}", diagnostic.message),
        });
    }
    let upstream_changes = collect_upstream_changes(upstream, &keywords);
    if upstream_changes.is_empty() {
        return Err(MiningError::Curation {
            stage: CurationStage::Collection,
            reason: format!("no deleted upstream line mentions {:?}", keywords.as_slice()),
        });
    }
    let repair = find_repair_commit(location, later, diagnostic_absent);
    let description = ConflictDescription {
        id: id.into(),
        upstream_changes,
        downstream_conflict: location.text.trim().to_string(),
        downstream_fix: repair.map(|r| r.fix_first_line),
        diagnostic: Some(diagnostic.clone()),
    };
    description.validate().map_err(|e| MiningError::Curation {
        stage: CurationStage::Collection,
        reason: e.to_string(),
    })?;
    Ok(description)
}
