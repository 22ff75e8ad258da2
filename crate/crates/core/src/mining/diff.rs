use super::{CommitRecord, FileDiff, Hunk, LineTag, MiningError};

fn strip_prefix_path(path: &str) -> &str {
    let path = path.split('\t').next().unwrap_or(path).trim_end();
    path.strip_prefix("a/")
        .or_else(|| path.strip_prefix("b/"))
        .unwrap_or(path)
}

fn parse_range(text: &str, line: usize) -> Result<(u32, u32), MiningError> {
    let bad = || MiningError::HunkHeader {
        line,
        header: text.to_string(),
    };
    let (start, count) = match text.split_once(',') {
        Some((s, c)) => (s, Some(c)),
        None => (text, None),
    };
    let start = start.parse().map_err(|_| bad())?;
    let count = match count {
        Some(c) => c.parse().map_err(|_| bad())?,
        None => 1,
    };
    Ok((start, count))
}

/// Parses `@@ -old[,n] +new[,n] @@ ...`, returning (old_start, old_count, new_start, new_count).
fn parse_hunk_header(header: &str, line: usize) -> Result<(u32, u32, u32, u32), MiningError> {
    let bad = || MiningError::HunkHeader {
        line,
        header: header.to_string(),
    };
    let rest = header.strip_prefix("@@ ").ok_or_else(bad)?;
    let (ranges, _) = rest.split_once(" @@").ok_or_else(bad)?;
    let (old, new) = ranges.split_once(' ').ok_or_else(bad)?;
    let old = old.strip_prefix('-').ok_or_else(bad)?;
    let new = new.strip_prefix('+').ok_or_else(bad)?;
    let (old_start, old_count) = parse_range(old, line)?;
    let (new_start, new_count) = parse_range(new, line)?;
    Ok((old_start, old_count, new_start, new_count))
}

/// Parses unified diff text (plain or `diff --git` style) into per-file hunks.
///
/// Hunk bodies are consumed by the counts in their headers, so a deleted line
/// that itself starts with `--` is never mistaken for a file header.
pub fn parse_unified_diff(text: &str) -> Result<Vec<FileDiff>, MiningError> {
    parse_lines(&text.lines().collect::<Vec<_>>(), 0)
}

pub(super) fn parse_lines(lines: &[&str], offset: usize) -> Result<Vec<FileDiff>, MiningError> {
    let mut files: Vec<FileDiff> = Vec::new();
    let mut current: Option<FileDiff> = None;
    let mut i = 0;

    while i < lines.len() {
        let line = lines[i];
        let lineno = offset + i + 1;

        if let Some(rest) = line.strip_prefix("diff --git ") {
            files.extend(current.take());
            let path = rest
                .rsplit_once(" b/")
                .map(|(_, b)| b.to_string())
                .unwrap_or_else(|| strip_prefix_path(rest).to_string());
            current = Some(FileDiff {
                path,
                hunks: Vec::new(),
            });
            i += 1;
        } else if line.starts_with("--- ") && lines.get(i + 1).is_some_and(|l| l.starts_with("+++ ")) {
            let old = strip_prefix_path(&line[4..]);
            let new = strip_prefix_path(&lines[i + 1][4..]);
            let path = if new == "/dev/null" { old } else { new }.to_string();
            match current.as_mut() {
                Some(file) if file.hunks.is_empty() => file.path = path,
                _ => {
                    files.extend(current.take());
                    current = Some(FileDiff {
                        path,
                        hunks: Vec::new(),
                    });
                }
            }
            i += 2;
        } else if line.starts_with("@@") {
            let (old_start, mut old_left, new_start, mut new_left) = parse_hunk_header(line, lineno)?;
            let file = current.as_mut().ok_or(MiningError::HunkOutsideFile { line: lineno })?;
            let mut hunk = Hunk {
                old_start,
                new_start,
                lines: Vec::new(),
            };
            i += 1;
            while old_left > 0 || new_left > 0 {
                let Some(&body) = lines.get(i) else {
                    return Err(MiningError::TruncatedHunk { line: lineno });
                };
                let (tag, text) = match body.chars().next() {
                    Some('-') => (LineTag::Deleted, &body[1..]),
                    Some('+') => (LineTag::Added, &body[1..]),
                    Some(' ') => (LineTag::Context, &body[1..]),
                    None => (LineTag::Context, ""),
                    Some('\\') => {
                        i += 1;
                        continue;
                    }
                    Some(_) => return Err(MiningError::TruncatedHunk { line: lineno }),
                };
                match tag {
                    LineTag::Deleted if old_left > 0 => old_left -= 1,
                    LineTag::Added if new_left > 0 => new_left -= 1,
                    LineTag::Context if old_left > 0 && new_left > 0 => {
                        old_left -= 1;
                        new_left -= 1;
                    }
                    _ => return Err(MiningError::TruncatedHunk { line: lineno }),
                }
                hunk.lines.push((tag, text.to_string()));
                i += 1;
            }
            if lines.get(i).is_some_and(|l| l.starts_with('\\')) {
                i += 1;
            }
            if let Some(prev) = file.hunks.last() {
                if hunk.old_start <= prev.old_start || hunk.new_start <= prev.new_start {
                    return Err(MiningError::HunkOrder { line: lineno });
                }
            }
            file.hunks.push(hunk);
        } else {
            // index, mode, rename and binary lines carry nothing we use
            i += 1;
        }
    }
    files.extend(current);
    Ok(files)
}

/// Renders file diffs back to unified diff text.
pub fn render_unified_diff(files: &[FileDiff]) -> String {
    let mut out = String::new();
    for file in files {
        out.push_str(&format!(
            "diff --git a/{0} b/{0}\n--- a/{0}\n+++ b/{0}\n",
            file.path
        ));
        for hunk in &file.hunks {
            let old = hunk.lines.iter().filter(|(t, _)| *t != LineTag::Added).count();
            let new = hunk.lines.iter().filter(|(t, _)| *t != LineTag::Deleted).count();
            out.push_str(&format!(
                "@@ -{},{} +{},{} @@\n",
                hunk.old_start, old, hunk.new_start, new
            ));
            for (tag, text) in &hunk.lines {
                out.push(match tag {
                    LineTag::Context => ' ',
                    LineTag::Deleted => '-',
                    LineTag::Added => '+',
                });
                out.push_str(text);
                out.push('\n');
            }
        }
    }
    out
}

fn ascii_only(s: &str) -> String {
    s.chars().filter(char::is_ascii).collect()
}

/// Parses a commit stream: `commit <id>`, a timestamp line, optional message
/// lines, then the unified diff of that commit.
pub fn parse_commit_stream(text: &str) -> Result<Vec<CommitRecord>, MiningError> {
    let lines: Vec<&str> = text.lines().collect();
    let is_header = |i: usize| {
        lines[i].starts_with("commit ")
            && lines
                .get(i + 1)
                .is_some_and(|t| t.trim().parse::<i64>().is_ok())
    };
    let starts: Vec<usize> = (0..lines.len()).filter(|&i| is_header(i)).collect();
    if starts.first().is_some_and(|&s| lines[..s].iter().any(|l| !l.trim().is_empty()))
        || (starts.is_empty() && lines.iter().any(|l| !l.trim().is_empty()))
    {
        return Err(MiningError::CommitStream {
            line: 1,
            reason: "expected `commit <id>` followed by a timestamp line".into(),
        });
    }

    let mut commits = Vec::with_capacity(starts.len());
    for (n, &start) in starts.iter().enumerate() {
        let end = starts.get(n + 1).copied().unwrap_or(lines.len());
        let commit_id = lines[start]["commit ".len()..].trim().to_string();
        if commit_id.is_empty() {
            return Err(MiningError::CommitStream {
                line: start + 1,
                reason: "empty commit id".into(),
            });
        }
        let timestamp = lines[start + 1].trim().parse().expect("checked by is_header");

        let body_start = start + 2;
        let diff_start = (body_start..end)
            .find(|&i| lines[i].starts_with("diff ") || lines[i].starts_with("--- "))
            .unwrap_or(end);
        let message = lines[body_start..diff_start]
            .iter()
            .map(|l| ascii_only(l.strip_prefix("    ").unwrap_or(l)))
            .filter(|l| !l.trim().is_empty())
            .collect::<Vec<_>>()
            .join("\n");
        let diffs = parse_lines(&lines[diff_start..end], diff_start)?;
        commits.push(CommitRecord {
            commit_id,
            timestamp,
            diffs,
            message,
        });
    }
    Ok(commits)
}

pub fn render_commit_stream(commits: &[CommitRecord]) -> String {
    let mut out = String::new();
    for c in commits {
        out.push_str(&format!("commit {}\n{}\n", c.commit_id, c.timestamp));
        for line in c.message.lines() {
            out.push_str("    ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&render_unified_diff(&c.diffs));
    }
    out
}
