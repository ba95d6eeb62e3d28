//! Generation endpoint contract: `POST {"prompt": ...}` answered with
//! `{"text": ...}`, plus a fixture-backed stand-in for tests and demos.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub prompt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationEndpointConfig {
    pub url: String,
    pub timeout_secs: f64,
    /// Completions longer than this many bytes are rejected.
    pub max_response_bytes: usize,
    /// Extra attempts after a timeout or connection failure.
    pub retries: u32,
}

impl Default for GenerationEndpointConfig {
    fn default() -> Self {
        GenerationEndpointConfig {
            url: "http://127.0.0.1:8081/generate".to_string(),
            timeout_secs: 120.0,
            max_response_bytes: 64 * 1024,
            retries: 0,
        }
    }
}

impl GenerationEndpointConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err(GenerateError::InvalidConfig(format!("timeout must be > 0, got {}", self.timeout_secs)));
        }
        if self.url.trim().is_empty() {
            return Err(GenerateError::InvalidConfig("endpoint url is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("generation endpoint timed out after {0:?}")]
    Timeout(Duration),
    #[error("generation endpoint unreachable: {0}")]
    Unreachable(String),
    #[error("generation endpoint answered with status {0}")]
    Status(u16),
    #[error("generation endpoint sent a malformed response: {0}")]
    Malformed(String),
    #[error("completion of {actual} bytes exceeds the {limit}-byte limit")]
    TooLarge { limit: usize, actual: usize },
    #[error("invalid generation endpoint config: {0}")]
    InvalidConfig(String),
    #[error("no fixture recorded for this prompt")]
    NoFixture,
}

impl GenerateError {
    /// Stable machine-readable reason.
    pub fn code(&self) -> &'static str {
        match self {
            GenerateError::Timeout(_) => "glm_timeout",
            GenerateError::Unreachable(_) => "glm_unreachable",
            GenerateError::Status(_) => "glm_bad_status",
            GenerateError::Malformed(_) => "glm_malformed_response",
            GenerateError::TooLarge { .. } => "glm_response_too_large",
            GenerateError::InvalidConfig(_) => "glm_config",
            GenerateError::NoFixture => "glm_no_fixture",
        }
    }

    fn retryable(&self) -> bool {
        matches!(self, GenerateError::Timeout(_) | GenerateError::Unreachable(_))
    }
}

/// Anything that turns a prompt into a completion.
#[async_trait]
pub trait Generator: Send + Sync {
    async fn generate(&self, prompt: &str) -> Result<String, GenerateError>;
}

/// Client for an HTTP generation endpoint.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    client: reqwest::Client,
    config: GenerationEndpointConfig,
}

impl HttpGenerator {
    pub fn new(config: GenerationEndpointConfig) -> Result<Self, GenerateError> {
        config.validate()?;
        let client = reqwest::Client::builder()
            .timeout(config.timeout())
            .build()
            .map_err(|e| GenerateError::InvalidConfig(e.to_string()))?;
        Ok(HttpGenerator { client, config })
    }

    pub fn config(&self) -> &GenerationEndpointConfig {
        &self.config
    }

    async fn attempt(&self, prompt: &str) -> Result<String, GenerateError> {
        let classify = |e: reqwest::Error| {
            if e.is_timeout() {
                GenerateError::Timeout(self.config.timeout())
            } else if e.is_connect() || e.is_request() {
                GenerateError::Unreachable(e.to_string())
            } else {
                GenerateError::Malformed(e.to_string())
            }
        };
        let resp = self
            .client
            .post(&self.config.url)
            .json(&GenerateRequest { prompt: prompt.to_string() })
            .send()
            .await
            .map_err(classify)?;
        if !resp.status().is_success() {
            return Err(GenerateError::Status(resp.status().as_u16()));
        }
        let body = resp.bytes().await.map_err(classify)?;
        let parsed: GenerateResponse =
            serde_json::from_slice(&body).map_err(|e| GenerateError::Malformed(e.to_string()))?;
        if parsed.text.len() > self.config.max_response_bytes {
            return Err(GenerateError::TooLarge { limit: self.config.max_response_bytes, actual: parsed.text.len() });
        }
        Ok(parsed.text)
    }
}

#[async_trait]
impl Generator for HttpGenerator {
    async fn generate(&self, prompt: &str) -> Result<String, GenerateError> {
        let mut attempts_left = self.config.retries;
        loop {
            match self.attempt(prompt).await {
                Err(e) if e.retryable() && attempts_left > 0 => attempts_left -= 1,
                other => return other,
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read fixture {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("fixture {path} is not a valid record: {source}")]
    Json { path: String, source: serde_json::Error },
}

/// One recorded exchange. A fixture without a prompt answers any prompt that
/// has no exact match.
#[derive(Debug, Clone, Deserialize)]
pub struct Fixture {
    #[serde(default)]
    pub prompt: Option<String>,
    pub completion: String,
}

/// Recorded (prompt, completion) pairs.
#[derive(Debug, Clone, Default)]
pub struct FixtureSet {
    by_prompt: BTreeMap<String, String>,
    fallback: Option<String>,
}

impl FixtureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prompt: impl Into<String>, completion: impl Into<String>) {
        self.by_prompt.insert(prompt.into(), completion.into());
    }

    pub fn with_fallback(mut self, completion: impl Into<String>) -> Self {
        self.fallback = Some(completion.into());
        self
    }

    pub fn add(&mut self, fixture: Fixture) {
        match fixture.prompt {
            Some(p) => self.insert(p, fixture.completion),
            None => self.fallback = Some(fixture.completion),
        }
    }

    /// Loads every `*.json` file of `dir` in file-name order.
    pub fn load_dir(dir: &Path) -> Result<Self, FixtureError> {
        let io_err = |source| FixtureError::Io { path: dir.display().to_string(), source };
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(io_err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        let mut set = FixtureSet::new();
        for path in paths {
            let shown = path.display().to_string();
            let text =
                std::fs::read_to_string(&path).map_err(|source| FixtureError::Io { path: shown.clone(), source })?;
            let fixture: Fixture =
                serde_json::from_str(&text).map_err(|source| FixtureError::Json { path: shown, source })?;
            set.add(fixture);
        }
        Ok(set)
    }

    pub fn lookup(&self, prompt: &str) -> Option<&str> {
        self.by_prompt.get(prompt).or(self.fallback.as_ref()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_prompt.len() + usize::from(self.fallback.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// In-process generator replaying recorded fixtures.
#[derive(Debug, Clone, Default)]
pub struct FixtureGenerator {
    fixtures: FixtureSet,
}

impl FixtureGenerator {
    pub fn new(fixtures: FixtureSet) -> Self {
        FixtureGenerator { fixtures }
    }
}

#[async_trait]
impl Generator for FixtureGenerator {
    async fn generate(&self, prompt: &str) -> Result<String, GenerateError> {
        self.fixtures.lookup(prompt).map(str::to_string).ok_or(GenerateError::NoFixture)
    }
}
