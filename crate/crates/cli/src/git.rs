//! The only place that shells out to the version-control tool.

use anyhow::{bail, Context, Result};
use std::path::Path;
use std::process::Command;

fn git(repo: &Path, args: &[&str]) -> Result<String> {
    let output = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .output()
        .context("running git (is it installed?)")?;
    if !output.status.success() {
        bail!(
            "git {} failed in {}: {}",
            args.join(" "),
            repo.display(),
            String::from_utf8_lossy(&output.stderr).trim()
        );
    }
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

/// Whole history, oldest first, in the commit-stream layout the miner parses.
pub fn log_stream(repo: &Path) -> Result<String> {
    git(
        repo,
        &[
            "log",
            "--reverse",
            "-p",
            "--no-color",
            "--no-renames",
            "--no-ext-diff",
            "--format=commit %H%n%ct%n%w(0,4,4)%s",
        ],
    )
}

/// 1-based `line` of `file` as of `commit`.
pub fn line_at(repo: &Path, commit: &str, file: &str, line: u32) -> Result<String> {
    let text = git(repo, &["show", &format!("{commit}:{file}")])?;
    match text.lines().nth((line as usize).saturating_sub(1)) {
        Some(l) if line > 0 => Ok(l.to_string()),
        _ => bail!("{file} has no line {line} at {commit}"),
    }
}
