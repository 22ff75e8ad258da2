use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use mergeprompt_core::backend::{
    CompletionBackend, CompletionParams, EchoBackend, RemoteBackend, RemoteConfig, ReplayBackend, RetryingBackend,
    RuleMockBackend,
};
use mergeprompt_core::eval::EvalMode;
use mergeprompt_core::prompt::{PromptFormat, SelectionStrategy, DEFAULT_BUDGET};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Remote,
    Replay,
    #[default]
    RuleMock,
    Echo,
}

/// Effective settings of one run. Embedded in every report it produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendKind,
    pub endpoint: Option<String>,
    /// Name of the environment variable that holds the API credential.
    pub credential_env: Option<String>,
    pub model: Option<String>,
    /// JSON-lines fixture file for the replay backend.
    pub replay: Option<PathBuf>,
    pub format: PromptFormat,
    pub strategy: SelectionStrategy,
    pub budget: usize,
    pub trials: usize,
    pub temperature: f64,
    pub max_tokens: u32,
    pub stop: Vec<String>,
    pub seed: u64,
    /// Defaults to prefix matching for semantic prompts and exact matching otherwise.
    pub eval_mode: Option<EvalMode>,
    /// Number of shots. Semantic prompts use the built-in shot (0 or 1);
    /// textual prompts draw this many examples from the corpus.
    pub shots: usize,
    /// Textual shots by example id; overrides random selection.
    pub shot_ids: Vec<String>,
    /// Concurrent trials per example.
    pub parallelism: usize,
    /// Examples processed concurrently.
    pub workers: usize,
    /// Attempts per completion for the remote backend.
    pub retries: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = CompletionParams::default();
        Self {
            backend: BackendKind::default(),
            endpoint: None,
            credential_env: None,
            model: None,
            replay: None,
            format: PromptFormat::SemanticDiff,
            strategy: SelectionStrategy::MaximalDistinct,
            budget: DEFAULT_BUDGET,
            trials: params.trials,
            temperature: params.temperature,
            max_tokens: params.max_tokens,
            stop: params.stop,
            seed: 0,
            eval_mode: None,
            shots: 1,
            shot_ids: Vec::new(),
            parallelism: mergeprompt_core::backend::DEFAULT_PARALLELISM,
            workers: 4,
            retries: 3,
        }
    }
}

impl RunConfig {
    pub fn eval_mode(&self) -> EvalMode {
        self.eval_mode.unwrap_or(if self.format.is_textual() {
            EvalMode::ExactMultiline
        } else {
            EvalMode::PrefixFirstLine
        })
    }

    pub fn params(&self) -> CompletionParams {
        CompletionParams {
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            stop: self.stop.clone(),
            trials: self.trials,
            seed: Some(self.seed),
            trial: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        match self.backend {
            BackendKind::Remote if self.endpoint.is_none() || self.credential_env.is_none() => {
                bail!("the remote backend needs both `endpoint` and `credential_env`")
            }
            BackendKind::Replay if self.replay.is_none() => bail!("the replay backend needs a `replay` fixture file"),
            _ => Ok(()),
        }
    }

    pub fn backend(&self) -> Result<Box<dyn CompletionBackend>> {
        Ok(match self.backend {
            BackendKind::Remote => {
                let remote = RemoteBackend::new(&RemoteConfig {
                    endpoint: self.endpoint.clone().unwrap_or_default(),
                    credential_env: self.credential_env.clone(),
                    model: self.model.clone(),
                    timeout_secs: 60,
                })?;
                Box::new(RetryingBackend::new(remote, self.retries, Duration::from_secs(1)))
            }
            BackendKind::Replay => {
                let path = self.replay.as_deref().unwrap_or(Path::new(""));
                let file = File::open(path).with_context(|| format!("opening replay file {}", path.display()))?;
                Box::new(ReplayBackend::from_jsonl(BufReader::new(file))?)
            }
            BackendKind::RuleMock => Box::new(RuleMockBackend),
            BackendKind::Echo => Box::new(EchoBackend),
        })
    }
}

/// Turns `\n`, `\t` and `\\` escapes in a flag value into characters.
fn unescape(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

/// Run settings. Precedence: flag, then environment variable, then the
/// TOML file given by `--config`, then built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML file with run settings.
    #[arg(long, env = "MERGEPROMPT_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "MERGEPROMPT_BACKEND", value_enum)]
    pub backend: Option<BackendKind>,
    #[arg(long, env = "MERGEPROMPT_ENDPOINT")]
    pub endpoint: Option<String>,
    /// Name of the variable holding the credential (the credential itself is never a flag).
    #[arg(long, env = "MERGEPROMPT_CREDENTIAL_ENV")]
    pub credential_env: Option<String>,
    #[arg(long, env = "MERGEPROMPT_MODEL")]
    pub model: Option<String>,
    #[arg(long, env = "MERGEPROMPT_REPLAY")]
    pub replay: Option<PathBuf>,
    /// semantic_diff, conflict_markers or merge_tuple.
    #[arg(long, env = "MERGEPROMPT_FORMAT")]
    pub format: Option<PromptFormat>,
    /// first_pair, maximal_plain or maximal_distinct.
    #[arg(long, env = "MERGEPROMPT_STRATEGY")]
    pub strategy: Option<SelectionStrategy>,
    #[arg(long, env = "MERGEPROMPT_BUDGET")]
    pub budget: Option<usize>,
    #[arg(long, env = "MERGEPROMPT_TRIALS")]
    pub trials: Option<usize>,
    #[arg(long, env = "MERGEPROMPT_TEMPERATURE")]
    pub temperature: Option<f64>,
    #[arg(long, env = "MERGEPROMPT_MAX_TOKENS")]
    pub max_tokens: Option<u32>,
    /// Stop sequence (repeatable; `\n` escapes allowed).
    #[arg(long = "stop")]
    pub stop: Vec<String>,
    #[arg(long, env = "MERGEPROMPT_SEED")]
    pub seed: Option<u64>,
    /// prefix_first_line or exact_multiline.
    #[arg(long, env = "MERGEPROMPT_EVAL_MODE")]
    pub eval_mode: Option<EvalMode>,
    #[arg(long, env = "MERGEPROMPT_SHOTS")]
    pub shots: Option<usize>,
    /// Textual shot example id (repeatable).
    #[arg(long = "shot-id")]
    pub shot_ids: Vec<String>,
    #[arg(long, env = "MERGEPROMPT_PARALLELISM")]
    pub parallelism: Option<usize>,
    #[arg(long, env = "MERGEPROMPT_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, env = "MERGEPROMPT_RETRIES")]
    pub retries: Option<u32>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v.into();
                }
            )*};
        }
        take!(backend, format, strategy, budget, trials, temperature, max_tokens, seed, shots, parallelism, workers, retries);
        take!(endpoint, credential_env, model, replay, eval_mode);
        if !self.stop.is_empty() {
            cfg.stop = self.stop.iter().map(|s| unescape(s)).collect();
        }
        if !self.shot_ids.is_empty() {
            cfg.shot_ids = self.shot_ids.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "trials = 3\nformat = \"merge_tuple\"\nstop = [\"\\n\\n\"]\n").unwrap();
        let args = ConfigArgs {
            config: Some(path),
            trials: Some(5),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.trials, 5);
        assert_eq!(cfg.format, PromptFormat::MergeTuple);
        assert_eq!(cfg.stop, ["\n\n"]);
        assert_eq!(cfg.eval_mode(), EvalMode::ExactMultiline);
    }

    #[test]
    fn remote_requires_endpoint_and_credential() {
        let args = ConfigArgs {
            backend: Some(BackendKind::Remote),
            endpoint: Some("http://localhost".into()),
            ..Default::default()
        };
        assert!(args.resolve().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("trails = 3").is_err());
    }

    #[test]
    fn escapes() {
        assert_eq!(unescape("\\nQuestion"), "\nQuestion");
        assert_eq!(unescape("a\\\\b\\"), "a\\b\\");
    }
}
