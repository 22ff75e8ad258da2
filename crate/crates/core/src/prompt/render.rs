//! Bit-exact prompt grammars and their parsers.
//!
//! semantic_diff:
//! ```text
//! Question:
//! --{before}
//! ++{after line}...
//!
//! -{conflict}
//!
//! Answer:
//! +{fix}
//!
//! ```
//! conflict_markers uses `<<<<<<< HEAD` / `|||||||` / `=======` / `>>>>>>>`
//! under `Question:` and answers under `Answer:`. merge_tuple lists
//! `a.js:`, `base.js:`, `b.js:` under `Questions:` and answers under `Answers:`.

use super::{Example, PromptError, PromptFormat, Shot};
use crate::model::{ConflictDescription, TextualConflict, UpstreamChange};

fn clean(line: &str) -> &str {
    line.trim_end_matches(['\r', '\n'])
}

fn push_line(out: &mut String, prefix: &str, line: &str) {
    out.push_str(prefix);
    out.push_str(clean(line));
    out.push('\n');
}

/// One `--`/`++` block including its trailing blank line.
pub fn render_pair(pair: &UpstreamChange) -> String {
    let mut out = String::new();
    push_line(&mut out, "--", &pair.before);
    for line in pair.after.split('\n') {
        push_line(&mut out, "++", line);
    }
    out.push('\n');
    out
}

pub fn semantic_query(description: &ConflictDescription, pairs: &[UpstreamChange]) -> String {
    let mut out = String::from("Question:\n");
    for pair in pairs {
        out.push_str(&render_pair(pair));
    }
    push_line(&mut out, "-", &description.downstream_conflict);
    out.push_str("\nAnswer:\n");
    out
}

fn textual_query(format: PromptFormat, conflict: &TextualConflict) -> String {
    let mut out = String::new();
    match format {
        PromptFormat::ConflictMarkers => {
            out.push_str("Question:\n<<<<<<< HEAD\n");
            conflict.variant_a.iter().for_each(|l| push_line(&mut out, "", l));
            if !conflict.base.is_empty() {
                out.push_str("|||||||\n");
                conflict.base.iter().for_each(|l| push_line(&mut out, "", l));
            }
            out.push_str("=======\n");
            conflict.variant_b.iter().for_each(|l| push_line(&mut out, "", l));
            out.push_str(">>>>>>>\n\nAnswer:\n");
        }
        PromptFormat::MergeTuple => {
            out.push_str("Questions:\na.js:\n");
            conflict.variant_a.iter().for_each(|l| push_line(&mut out, "", l));
            out.push_str("base.js:\n");
            conflict.base.iter().for_each(|l| push_line(&mut out, "", l));
            out.push_str("b.js:\n");
            conflict.variant_b.iter().for_each(|l| push_line(&mut out, "", l));
            out.push_str("\n\nAnswers:\n");
        }
        PromptFormat::SemanticDiff => unreachable!("textual formats only"),
    }
    out
}

fn check_format(format: PromptFormat, example: &Example<'_>) -> Result<(), PromptError> {
    let ok = matches!(
        (format, example),
        (PromptFormat::SemanticDiff, Example::Semantic(_))
            | (PromptFormat::ConflictMarkers | PromptFormat::MergeTuple, Example::Textual(_))
    );
    if ok {
        Ok(())
    } else {
        Err(PromptError::FormatMismatch(format))
    }
}

/// The query for `target`: everything up to and including the answer cue.
/// Semantic targets include all of their upstream pairs.
pub fn build_query(format: PromptFormat, target: &Example<'_>) -> Result<String, PromptError> {
    check_format(format, target)?;
    Ok(match target {
        Example::Semantic(d) => semantic_query(d, &d.upstream_changes),
        Example::Textual(c) => textual_query(format, c),
    })
}

/// A complete question/answer shot. Requires ground truth.
pub fn render_shot(format: PromptFormat, example: &Example<'_>) -> Result<Shot, PromptError> {
    let question = build_query(format, example)?;
    let mut answer = String::new();
    match example {
        Example::Semantic(d) => {
            let fix = d.fix().ok_or_else(|| PromptError::MissingGroundTruth(d.id.clone()))?;
            push_line(&mut answer, "+", fix);
        }
        Example::Textual(c) => {
            if c.resolution.is_empty() {
                return Err(PromptError::MissingGroundTruth(c.id.clone()));
            }
            c.resolution.iter().for_each(|l| push_line(&mut answer, "", l));
        }
    }
    answer.push('\n');
    Ok(Shot { question, answer })
}

/// One parsed semantic block. `fix` is `None` for the trailing query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticBlock {
    pub pairs: Vec<UpstreamChange>,
    pub conflict: String,
    pub fix: Option<String>,
}

/// One parsed textual block. `resolution` is `None` for the trailing query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextualBlock {
    pub variant_a: Vec<String>,
    pub base: Vec<String>,
    pub variant_b: Vec<String>,
    pub resolution: Option<Vec<String>>,
}

struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.split('\n').collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn peek_at(&self, ahead: usize) -> Option<&'a str> {
        self.lines.get(self.pos + ahead).copied()
    }

    fn next(&mut self) -> Option<&'a str> {
        let line = self.peek();
        self.pos += 1;
        line
    }

    fn expect(&mut self, want: &str) -> Result<(), PromptError> {
        match self.next() {
            Some(line) if line == want => Ok(()),
            other => Err(self.error(format!("expected {want:?}, found {other:?}"))),
        }
    }

    /// True when only the empty tail after the final newline remains.
    fn at_end(&self) -> bool {
        self.pos + 1 == self.lines.len() && self.lines[self.pos].is_empty()
    }

    fn error(&self, reason: String) -> PromptError {
        PromptError::Parse {
            line: self.pos.min(self.lines.len()),
            reason,
        }
    }
}

/// Parses a semantic_diff prompt (shots followed by an optional query).
pub fn parse_semantic(text: &str) -> Result<Vec<SemanticBlock>, PromptError> {
    let mut cur = Cursor::new(text);
    let mut blocks = Vec::new();
    while !cur.at_end() {
        cur.expect("Question:")?;
        let mut pairs = Vec::new();
        let conflict = loop {
            let line = cur.next().ok_or_else(|| cur.error("unexpected end of prompt".into()))?;
            let Some(rest) = line.strip_prefix('-') else {
                return Err(cur.error(format!("expected a `--` pair or `-` conflict, found {line:?}")));
            };
            if cur.peek() == Some("") && cur.peek_at(1) == Some("Answer:") {
                break rest.to_string();
            }
            let before = rest
                .strip_prefix('-')
                .ok_or_else(|| cur.error("pair line must start with `--`".into()))?;
            let mut after = Vec::new();
            while let Some(l) = cur.peek().and_then(|l| l.strip_prefix("++")) {
                after.push(l);
                cur.next();
            }
            if after.is_empty() {
                return Err(cur.error("`--` line without `++` lines".into()));
            }
            cur.expect("")?;
            pairs.push(UpstreamChange {
                before: before.to_string(),
                after: after.join("\n"),
            });
        };
        cur.expect("")?;
        cur.expect("Answer:")?;
        if cur.at_end() {
            blocks.push(SemanticBlock { pairs, conflict, fix: None });
            break;
        }
        let fix = cur
            .next()
            .and_then(|l| l.strip_prefix('+'))
            .ok_or_else(|| cur.error("answer must start with `+`".into()))?
            .to_string();
        cur.expect("")?;
        blocks.push(SemanticBlock {
            pairs,
            conflict,
            fix: Some(fix),
        });
    }
    Ok(blocks)
}

fn take_until<'a>(cur: &mut Cursor<'a>, stop: impl Fn(&str) -> bool) -> Result<Vec<String>, PromptError> {
    let mut out = Vec::new();
    loop {
        match cur.peek() {
            Some(line) if stop(line) => return Ok(out),
            Some(line) if cur.pos + 1 < cur.lines.len() => {
                out.push(line.to_string());
                cur.next();
            }
            _ => return Err(cur.error("unexpected end of prompt".into())),
        }
    }
}

fn take_answer(cur: &mut Cursor<'_>) -> Result<Option<Vec<String>>, PromptError> {
    if cur.at_end() {
        return Ok(None);
    }
    let lines = take_until(cur, str::is_empty)?;
    cur.expect("")?;
    Ok(Some(lines))
}

/// Parses a conflict_markers or merge_tuple prompt.
pub fn parse_textual(format: PromptFormat, text: &str) -> Result<Vec<TextualBlock>, PromptError> {
    let mut cur = Cursor::new(text);
    let mut blocks = Vec::new();
    while !cur.at_end() {
        let block = match format {
            PromptFormat::ConflictMarkers => {
                cur.expect("Question:")?;
                cur.expect("<<<<<<< HEAD")?;
                let variant_a = take_until(&mut cur, |l| l == "|||||||" || l == "=======")?;
                let base = if cur.peek() == Some("|||||||") {
                    cur.next();
                    take_until(&mut cur, |l| l == "=======")?
                } else {
                    Vec::new()
                };
                cur.expect("=======")?;
                let variant_b = take_until(&mut cur, |l| l == ">>>>>>>")?;
                cur.expect(">>>>>>>")?;
                cur.expect("")?;
                cur.expect("Answer:")?;
                TextualBlock {
                    variant_a,
                    base,
                    variant_b,
                    resolution: take_answer(&mut cur)?,
                }
            }
            PromptFormat::MergeTuple => {
                cur.expect("Questions:")?;
                cur.expect("a.js:")?;
                let variant_a = take_until(&mut cur, |l| l == "base.js:")?;
                cur.expect("base.js:")?;
                let base = take_until(&mut cur, |l| l == "b.js:")?;
                cur.expect("b.js:")?;
                let answers_at = cur.lines[cur.pos..]
                    .iter()
                    .position(|&l| l == "Answers:")
                    .map(|p| cur.pos + p)
                    .filter(|&p| p >= cur.pos + 2)
                    .ok_or_else(|| cur.error("missing `Answers:`".into()))?;
                let variant_b = cur.lines[cur.pos..answers_at - 2]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                cur.pos = answers_at - 2;
                cur.expect("")?;
                cur.expect("")?;
                cur.expect("Answers:")?;
                TextualBlock {
                    variant_a,
                    base,
                    variant_b,
                    resolution: take_answer(&mut cur)?,
                }
            }
            PromptFormat::SemanticDiff => return Err(PromptError::FormatMismatch(format)),
        };
        let is_query = block.resolution.is_none();
        blocks.push(block);
        if is_query {
            break;
        }
    }
    if !cur.at_end() && cur.pos < cur.lines.len() {
        return Err(cur.error("trailing text after the query".into()));
    }
    Ok(blocks)
}
