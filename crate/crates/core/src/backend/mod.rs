//! Completion backends: a remote HTTP client, deterministic offline doubles,
//! multi-trial sampling and post-processing of completions.

mod offline;
mod remote;
mod sample;

pub use offline::{EchoBackend, ReplayBackend, ReplayRecord, RuleMockBackend};
pub use remote::{RemoteBackend, RemoteConfig, RetryingBackend};
pub use sample::{derive_seed, sample_n, DEFAULT_PARALLELISM};

use crate::prompt::PromptFormat;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("rate limited (retry after {retry_after:?})")]
    RateLimited { retry_after: Option<Duration> },
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("no replay fixture for prompt {0}")]
    MissingFixture(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl BackendError {
    /// Rate limits and server-side failures are worth retrying.
    pub fn is_transient(&self) -> bool {
        match self {
            BackendError::RateLimited { .. } | BackendError::Transport(_) => true,
            BackendError::Status { status, .. } => *status >= 500,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompletionParams {
    pub temperature: f64,
    pub max_tokens: u32,
    pub stop: Vec<String>,
    pub trials: usize,
    pub seed: Option<u64>,
    /// Index of the trial this call belongs to; set by [`sample_n`].
    #[serde(skip)]
    pub trial: usize,
}

impl Default for CompletionParams {
    fn default() -> Self {
        Self {
            temperature: 0.7,
            max_tokens: 128,
            stop: vec!["\nQuestion".into(), "\n\n".into()],
            trials: 10,
            seed: None,
            trial: 0,
        }
    }
}

impl CompletionParams {
    pub fn validate(&self) -> Result<(), BackendError> {
        if self.trials == 0 {
            return Err(BackendError::InvalidParams("trials must be at least 1".into()));
        }
        if self.max_tokens == 0 {
            return Err(BackendError::InvalidParams("max_tokens must be at least 1".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(BackendError::InvalidParams(format!("temperature {} < 0", self.temperature)));
        }
        Ok(())
    }
}

/// Anything that turns a prompt into one completion.
///
/// Implementations are shared between sampling threads. Deterministic
/// backends must return the same text for the same prompt and parameters.
pub trait CompletionBackend: Send + Sync {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, BackendError>;
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for Box<B> {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, BackendError> {
        (**self).complete(prompt, params)
    }
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for std::sync::Arc<B> {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, BackendError> {
        (**self).complete(prompt, params)
    }
}

/// Hex SHA-256 of the prompt text, the key of replay fixtures.
pub fn prompt_sha256(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

const STOP_MARKERS: [&str; 2] = ["\nQuestion", "\n\n"];

/// Extracts the resolution from a raw completion.
///
/// The text is cut at the earliest stop marker. Semantic completions keep
/// only their first line, minus one leading `+` and surrounding spaces;
/// textual completions keep every line before the stop.
pub fn parse_resolution(completion: &str, format: PromptFormat) -> String {
    let completion = completion.replace("\r\n", "\n");
    let cut = STOP_MARKERS
        .iter()
        .filter_map(|m| completion.find(m))
        .min()
        .unwrap_or(completion.len());
    let body = &completion[..cut];
    match format {
        PromptFormat::SemanticDiff => {
            let first = body.split('\n').next().unwrap_or("");
            let first = first.trim_matches(' ');
            first.strip_prefix('+').unwrap_or(first).trim_matches(' ').to_string()
        }
        _ => body.trim_end_matches('\n').to_string(),
    }
}
