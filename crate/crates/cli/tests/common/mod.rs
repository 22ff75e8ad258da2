//! Shared helpers: running the binary and building small git histories.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mergeprompt"));
    // Keep the caller's environment from leaking into config resolution.
    for (key, _) in std::env::vars() {
        if key.starts_with("MERGEPROMPT_") {
            cmd.env_remove(key);
        }
    }
    cmd
}

pub fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed ({}):\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn git(repo: &Path, args: &[&str], date: u32) -> String {
    let stamp = format!("{} +0000", 1_600_000_000 + date * 3600);
    let out = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(["-c", "user.name=Dev", "-c", "user.email=dev@example.com", "-c", "commit.gpgsign=false"])
        .args(args)
        .env("GIT_AUTHOR_DATE", &stamp)
        .env("GIT_COMMITTER_DATE", &stamp)
        .output()
        .expect("git is installed");
    assert!(out.status.success(), "git {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim().to_string()
}

/// Applies `files` (path, content) and commits; returns the commit id.
pub fn commit(repo: &Path, n: u32, message: &str, files: &[(&str, &str)]) -> String {
    for (path, content) in files {
        let full = repo.join(path);
        std::fs::create_dir_all(full.parent().unwrap()).unwrap();
        std::fs::write(full, content).unwrap();
    }
    git(repo, &["add", "-A"], n);
    git(repo, &["commit", "-q", "-m", message], n);
    git(repo, &["rev-parse", "HEAD"], n)
}

pub struct FigRepo {
    pub root: PathBuf,
    /// Commit at which the downstream build breaks.
    pub break_commit: String,
    pub fix_commit: String,
}

const HEADER_BEFORE: &str = "class BrowserView {\n public:\n  bool IsIncognito() const;\n  void Show();\n};\n";
const HEADER_AFTER: &str = "class BrowserView {\n public:\n  bool GetIncognito() const;\n  void Show();\n};\n";
const IMPL_BEFORE: &str = "void BrowserView::Show() {\n  const bool incognito = browser_view_->IsIncognito();\n  Paint(incognito);\n}\n";
const IMPL_AFTER: &str = "void BrowserView::Show() {\n  const bool incognito = browser_view_->GetIncognito();\n  Paint(incognito);\n}\n";
const FORK_BEFORE: &str = "void MaybeShowBubble(Browser* browser) {\n  if (!browser ||\n      BrowserView::GetBrowserViewForBrowser(browser)->IsIncognito())\n    return;\n  ShowBubble();\n}\n";
const FORK_AFTER: &str = "void MaybeShowBubble(Browser* browser) {\n  if (!browser ||\n      BrowserView::GetBrowserViewForBrowser(browser)->GetIncognito())\n    return;\n  ShowBubble();\n}\n";

/// A fork whose downstream call site breaks after an upstream rename of
/// `IsIncognito()` to `GetIncognito()`, and a later commit that repairs it.
pub fn incognito_repo(root: &Path) -> FigRepo {
    git(root, &["init", "-q"], 0);
    commit(
        root,
        1,
        "Initial import",
        &[
            ("chrome/browser/ui/views/frame/browser_view.h", HEADER_BEFORE),
            ("chrome/browser/ui/views/frame/browser_view.cc", IMPL_BEFORE),
            ("edge/browser/bubble.cc", FORK_BEFORE),
        ],
    );
    commit(root, 2, "Unrelated cleanup", &[("README", "fork\n")]);
    let break_commit = commit(
        root,
        3,
        "Rename BrowserView::IsIncognito to GetIncognito",
        &[
            ("chrome/browser/ui/views/frame/browser_view.cc", IMPL_AFTER),
            ("chrome/browser/ui/views/frame/browser_view.h", HEADER_AFTER),
        ],
    );
    commit(root, 4, "More unrelated work", &[("README", "fork\nnotes\n")]);
    let fix_commit = commit(root, 5, "Fix build after upstream merge", &[("edge/browser/bubble.cc", FORK_AFTER)]);
    FigRepo {
        root: root.to_path_buf(),
        break_commit,
        fix_commit,
    }
}

/// The diagnostic for the broken call site, as the curate command expects it.
pub fn incognito_diagnostic(break_commit: &str) -> String {
    serde_json::json!([{
        "Id": "incognito",
        "ErrorType": "err_no_member",
        "Message": "Cannot find the definition for function 'IsIncognito()'",
        "File": "edge/browser/bubble.cc",
        "Line": 3,
        "Commit": break_commit,
    }])
    .to_string()
}

/// The expected conflict description, written out by hand.
pub const EXPECTED_DESCRIPTION: &str = r#"{
    "UpstreamChanges": [
        {
            "Before": "const bool incognito = browser_view_->IsIncognito();",
            "After": "const bool incognito = browser_view_->GetIncognito();"
        },
        {
            "Before": "bool IsIncognito() const;",
            "After": "bool GetIncognito() const;"
        }
    ],
    "DownstreamConflict": "BrowserView::GetBrowserViewForBrowser(browser)->IsIncognito())",
    "DownstreamFix": "BrowserView::GetBrowserViewForBrowser(browser)->GetIncognito())"
}"#;
