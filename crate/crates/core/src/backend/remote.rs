use super::{BackendError, CompletionBackend, CompletionParams};
use serde::{Deserialize, Serialize};
use std::time::Duration;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteConfig {
    /// Full URL of the completion endpoint.
    pub endpoint: String,
    /// Environment variable holding the bearer credential, if any.
    #[serde(default)]
    pub credential_env: Option<String>,
    /// Sent as `model` when set.
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_timeout() -> u64 {
    60
}

/// Client for an HTTP JSON completion endpoint.
///
/// Request: `{"prompt", "max_tokens", "temperature", "stop", "n": 1}`.
/// Response: `{"choices": [{"text": ...}, ...]}`; the first choice is returned verbatim.
pub struct RemoteBackend {
    endpoint: String,
    credential: Option<String>,
    model: Option<String>,
    client: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct Request<'a> {
    prompt: &'a str,
    max_tokens: u32,
    temperature: f64,
    stop: &'a [String],
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Deserialize)]
struct Response {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    text: Option<String>,
}

impl RemoteBackend {
    pub fn new(config: &RemoteConfig) -> Result<Self, BackendError> {
        let credential = match &config.credential_env {
            Some(var) => Some(
                std::env::var(var)
                    .map_err(|_| BackendError::Config(format!("credential variable {var} is not set")))?,
            ),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| BackendError::Config(e.to_string()))?;
        Ok(Self {
            endpoint: config.endpoint.clone(),
            credential,
            model: config.model.clone(),
            client,
        })
    }
}

fn retry_after(headers: &reqwest::header::HeaderMap) -> Option<Duration> {
    headers
        .get(reqwest::header::RETRY_AFTER)?
        .to_str()
        .ok()?
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|s| s.is_finite() && *s >= 0.0)
        .map(Duration::from_secs_f64)
}

impl CompletionBackend for RemoteBackend {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, BackendError> {
        let body = Request {
            prompt,
            max_tokens: params.max_tokens,
            temperature: params.temperature,
            stop: &params.stop,
            n: 1,
            model: self.model.as_deref(),
            seed: params.seed,
        };
        let mut request = self.client.post(&self.endpoint).json(&body);
        if let Some(token) = &self.credential {
            request = request.bearer_auth(token);
        }
        let response = request.send().map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status();
        if status.as_u16() == 429 {
            return Err(BackendError::RateLimited {
                retry_after: retry_after(response.headers()),
            });
        }
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Err(BackendError::Status {
                status: status.as_u16(),
                body: body.chars().take(500).collect(),
            });
        }
        let text = response.text().map_err(|e| BackendError::Transport(e.to_string()))?;
        let parsed: Response =
            serde_json::from_str(&text).map_err(|e| BackendError::Protocol(format!("bad response body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| BackendError::Protocol("empty choices array".into()))?
            .text
            .ok_or_else(|| BackendError::Protocol("first choice has no text".into()))
    }
}

/// Retries transient failures, sleeping for the server's `Retry-After` when
/// given and an exponential backoff otherwise.
pub struct RetryingBackend<B> {
    inner: B,
    max_attempts: u32,
    base_delay: Duration,
}

impl<B> RetryingBackend<B> {
    pub fn new(inner: B, max_attempts: u32, base_delay: Duration) -> Self {
        Self {
            inner,
            max_attempts: max_attempts.max(1),
            base_delay,
        }
    }
}

impl<B: CompletionBackend> CompletionBackend for RetryingBackend<B> {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, BackendError> {
        let mut attempt = 1;
        loop {
            match self.inner.complete(prompt, params) {
                Err(e) if e.is_transient() && attempt < self.max_attempts => {
                    let delay = match &e {
                        BackendError::RateLimited { retry_after: Some(d) } => *d,
                        _ => self.base_delay * 2u32.saturating_pow(attempt - 1),
                    };
                    log::warn!("attempt {attempt} failed ({e}); retrying in {delay:?}");
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}
