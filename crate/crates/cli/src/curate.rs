use crate::git;
use anyhow::{bail, Context, Result};
use clap::Args;
use mergeprompt_core::mining::{curate, parse_commit_stream, ConflictLocation, CurationStage, MiningError};
use mergeprompt_core::model::{save_conflict_descriptions, CompilerDiagnostic};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::Command;

#[derive(Debug, Args)]
pub struct CurateArgs {
    /// Repository whose history is mined with `git log -p`.
    #[arg(long, required_unless_present = "diff_stream", conflicts_with = "diff_stream")]
    pub repo: Option<PathBuf>,
    /// Pre-recorded commit stream (same layout as the git driver's output).
    #[arg(long)]
    pub diff_stream: Option<PathBuf>,
    /// JSON array or JSON-lines of diagnostics.
    #[arg(long)]
    pub diagnostics: PathBuf,
    /// Shell command deciding whether a candidate repair commit removed the
    /// diagnostic; it sees the commit id in MERGEPROMPT_COMMIT and exits 0 if so.
    #[arg(long)]
    pub verify_cmd: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// One diagnostic plus where in history it was observed.
#[derive(Debug, Deserialize)]
struct DiagnosticRecord {
    #[serde(flatten)]
    diagnostic: CompilerDiagnostic,
    /// Commit (or unique prefix) at which the build broke.
    #[serde(rename = "Commit", alias = "commit")]
    commit: String,
    /// Text of the failing line; read from the repository when absent.
    #[serde(rename = "SourceLine", alias = "source_line", default)]
    source_line: Option<String>,
    #[serde(rename = "Id", alias = "id", default)]
    id: Option<String>,
}

fn load_diagnostics(path: &Path) -> Result<Vec<DiagnosticRecord>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for value in serde_json::Deserializer::from_str(&text).into_iter::<serde_json::Value>() {
        let value = value.with_context(|| format!("parsing {}", path.display()))?;
        let items = match value {
            serde_json::Value::Array(items) => items,
            other => vec![other],
        };
        for item in items {
            out.push(serde_json::from_value(item).with_context(|| format!("bad diagnostic record in {}", path.display()))?);
        }
    }
    Ok(out)
}

fn verify(cmd: &str, commit: &str) -> bool {
    Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .env("MERGEPROMPT_COMMIT", commit)
        .status()
        .map(|s| s.success())
        .unwrap_or_else(|e| {
            log::warn!("verify command failed to start: {e}");
            false
        })
}

/// Returns the number of diagnostics that could not be curated.
pub fn run(args: &CurateArgs) -> Result<usize> {
    let diagnostics = load_diagnostics(&args.diagnostics)?;
    let stream = match (&args.repo, &args.diff_stream) {
        (Some(repo), _) => git::log_stream(repo)?,
        (None, Some(path)) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        (None, None) => bail!("either --repo or --diff-stream is required"),
    };
    let commits = parse_commit_stream(&stream)?;

    let (mut keyword_failures, mut collection_failures, mut other_failures) = (0, 0, 0);
    let mut corpus = Vec::new();
    for (index, record) in diagnostics.iter().enumerate() {
        let id = record.id.clone().unwrap_or_else(|| index.to_string());
        let result = (|| -> Result<_> {
            let at = commits
                .iter()
                .position(|c| c.commit_id.starts_with(&record.commit))
                .with_context(|| format!("commit {} not in history", record.commit))?;
            let text = match (&record.source_line, &args.repo) {
                (Some(line), _) => line.clone(),
                (None, Some(repo)) => git::line_at(repo, &commits[at].commit_id, &record.diagnostic.file, record.diagnostic.line)?,
                (None, None) => bail!("no SourceLine and no repository to read it from"),
            };
            let location = ConflictLocation {
                file: record.diagnostic.file.clone(),
                line: record.diagnostic.line,
                text,
            };
            let absent = |commit: &str| args.verify_cmd.as_deref().is_none_or(|cmd| verify(cmd, commit));
            Ok(curate(id.clone(), &commits[..=at], &commits[at + 1..], &record.diagnostic, &location, absent)?)
        })();
        match result {
            Ok(description) => corpus.push(description),
            Err(e) => {
                match e.downcast_ref::<MiningError>() {
                    Some(MiningError::Curation { stage: CurationStage::Keywords, .. }) => keyword_failures += 1,
                    Some(MiningError::Curation { stage: CurationStage::Collection, .. }) => collection_failures += 1,
                    _ => other_failures += 1,
                }
                log::warn!("skipping diagnostic {id}: {e:#}");
            }
        }
    }

    let bytes = save_conflict_descriptions(&corpus);
    match &args.output {
        Some(path) => std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", String::from_utf8_lossy(&bytes)),
    }
    let with_fix = corpus.iter().filter(|d| d.downstream_fix.is_some()).count();
    eprintln!("commits: {}", commits.len());
    eprintln!("diagnostics: {}", diagnostics.len());
    eprintln!("keyword failures: {keyword_failures}");
    eprintln!("collection failures: {collection_failures}");
    eprintln!("other failures: {other_failures}");
    eprintln!("curated: {} (with fix: {with_fix})", corpus.len());
    Ok(keyword_failures + collection_failures + other_failures)
}
