//! Character-level edit sequences.
//!
//! A pair of lines is summarised by the shape of its diff: a string over
//! `=`, `-` and `+` where runs of the same operation collapse to one symbol
//! and every changed region lists its deletions before its insertions. Two
//! renames of different identifiers therefore share the pattern `=-+=`.
//!
//! The diff is a longest-common-subsequence alignment. Equal characters are
//! always matched when they meet; when deleting and inserting are both
//! optimal, the smaller of the two characters is consumed first. That choice
//! is symmetric in the two inputs, so swapping them swaps `-` and `+`.

use crate::model::UpstreamChange;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditOp {
    Equal(char),
    Delete(char),
    Insert(char),
}

impl EditOp {
    pub fn symbol(self) -> char {
        match self {
            EditOp::Equal(_) => '=',
            EditOp::Delete(_) => '-',
            EditOp::Insert(_) => '+',
        }
    }

    pub fn payload(self) -> char {
        match self {
            EditOp::Equal(c) | EditOp::Delete(c) | EditOp::Insert(c) => c,
        }
    }
}

/// Compressed edit pattern, e.g. `=-+=`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EditSequence(String);

impl EditSequence {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Canonicalises an arbitrary symbol string: runs collapse and, inside
    /// every changed region, `-` is placed before `+`.
    ///
    /// Returns `None` if the input contains a symbol outside `=-+`.
    pub fn canonicalize(symbols: &str) -> Option<EditSequence> {
        let mut out = String::new();
        let mut del = false;
        let mut ins = false;
        let flush = |out: &mut String, del: &mut bool, ins: &mut bool| {
            if *del {
                out.push('-');
            }
            if *ins {
                out.push('+');
            }
            *del = false;
            *ins = false;
        };
        for c in symbols.chars() {
            match c {
                '=' => {
                    flush(&mut out, &mut del, &mut ins);
                    if !out.ends_with('=') {
                        out.push('=');
                    }
                }
                '-' => del = true,
                '+' => ins = true,
                _ => return None,
            }
        }
        flush(&mut out, &mut del, &mut ins);
        Some(EditSequence(out))
    }

    /// The sequence for the reversed diff (`b` to `a`).
    pub fn swapped(&self) -> EditSequence {
        let flipped: String = self
            .0
            .chars()
            .map(|c| match c {
                '-' => '+',
                '+' => '-',
                other => other,
            })
            .collect();
        EditSequence::canonicalize(&flipped).expect("symbols stay within =-+")
    }
}

impl fmt::Display for EditSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApplyError {
    #[error("op {index} expects {expected:?} but the input has {found:?}")]
    Mismatch {
        index: usize,
        expected: char,
        found: Option<char>,
    },
    #[error("{0} input characters left unconsumed")]
    Trailing(usize),
}

/// Minimal character diff between `a` and `b`, with deletions placed before
/// insertions inside each changed region.
pub fn diff_chars(a: &[char], b: &[char]) -> Vec<EditOp> {
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    // lcs[i * width + j] = LCS length of a[i..] and b[j..]
    let mut lcs = vec![0u32; (n + 1) * width];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i * width + j] = if a[i] == b[j] {
                lcs[(i + 1) * width + j + 1] + 1
            } else {
                lcs[(i + 1) * width + j].max(lcs[i * width + j + 1])
            };
        }
    }

    let mut ops = Vec::with_capacity(n + m);
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m && a[i] == b[j] {
            ops.push(EditOp::Equal(a[i]));
            i += 1;
            j += 1;
        } else if j == m {
            ops.push(EditOp::Delete(a[i]));
            i += 1;
        } else if i == n {
            ops.push(EditOp::Insert(b[j]));
            j += 1;
        } else {
            let here = lcs[i * width + j];
            let delete_ok = lcs[(i + 1) * width + j] == here;
            let insert_ok = lcs[i * width + j + 1] == here;
            if delete_ok && (!insert_ok || a[i] < b[j]) {
                ops.push(EditOp::Delete(a[i]));
                i += 1;
            } else {
                ops.push(EditOp::Insert(b[j]));
                j += 1;
            }
        }
    }
    canonical_order(ops)
}

/// Stable partition of every changed region into deletions then insertions.
pub(crate) fn canonical_order(ops: Vec<EditOp>) -> Vec<EditOp> {
    let mut out = Vec::with_capacity(ops.len());
    let mut pending_ins = Vec::new();
    for op in ops {
        match op {
            EditOp::Delete(_) => out.push(op),
            EditOp::Insert(_) => pending_ins.push(op),
            EditOp::Equal(_) => {
                out.append(&mut pending_ins);
                out.push(op);
            }
        }
    }
    out.append(&mut pending_ins);
    out
}

pub(crate) fn strip_spaces(s: &str) -> Vec<char> {
    s.chars().filter(|&c| c != ' ').collect()
}

/// Uncompressed ops turning space-stripped `a` into space-stripped `b`.
pub fn edit_script(a: &str, b: &str) -> Vec<EditOp> {
    diff_chars(&strip_spaces(a), &strip_spaces(b))
}

pub fn compress(ops: &[EditOp]) -> EditSequence {
    let mut out = String::new();
    for op in ops {
        let s = op.symbol();
        if !out.ends_with(s) {
            out.push(s);
        }
    }
    EditSequence(out)
}

/// Compressed edit pattern between two lines, ignoring ASCII spaces.
pub fn edit_sequence(a: &str, b: &str) -> EditSequence {
    compress(&edit_script(a, b))
}

/// Replays uncompressed ops on `a`.
pub fn apply(ops: &[EditOp], a: &str) -> Result<String, ApplyError> {
    let mut input = a.chars();
    let mut out = String::new();
    for (index, op) in ops.iter().enumerate() {
        match *op {
            EditOp::Insert(c) => out.push(c),
            EditOp::Equal(c) | EditOp::Delete(c) => {
                let found = input.next();
                if found != Some(c) {
                    return Err(ApplyError::Mismatch {
                        index,
                        expected: c,
                        found,
                    });
                }
                if let EditOp::Equal(_) = op {
                    out.push(c);
                }
            }
        }
    }
    let rest = input.count();
    if rest > 0 {
        return Err(ApplyError::Trailing(rest));
    }
    Ok(out)
}

/// Pattern used to compare change pairs: `before` against the first line of `after`.
pub fn change_pattern(change: &UpstreamChange) -> EditSequence {
    edit_sequence(&change.before, change.after_first_line())
}

/// Lazily yields the first pair of every distinct pattern, in input order.
pub fn distinct_pairs<'a, I>(pairs: I) -> impl Iterator<Item = &'a UpstreamChange>
where
    I: IntoIterator<Item = &'a UpstreamChange>,
{
    let mut seen = HashSet::new();
    pairs
        .into_iter()
        .filter(move |pair| seen.insert(change_pattern(pair)))
}

pub fn distinct_filter(pairs: &[UpstreamChange]) -> Vec<UpstreamChange> {
    distinct_pairs(pairs).cloned().collect()
}
