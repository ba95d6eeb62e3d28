//! Service configuration: a TOML file overlaid with `MLPRACTICE_*`
//! environment variables. Environment values win.

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use mlpractice_core::glm::GenerationEndpointConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ENV_HOST: &str = "MLPRACTICE_HOST";
pub const ENV_PORT: &str = "MLPRACTICE_PORT";
pub const ENV_CORPUS: &str = "MLPRACTICE_CORPUS";
pub const ENV_INDEX: &str = "MLPRACTICE_INDEX";
pub const ENV_FEEDBACK: &str = "MLPRACTICE_FEEDBACK";
pub const ENV_GLM_URL: &str = "MLPRACTICE_GLM_URL";
pub const ENV_GLM_TIMEOUT: &str = "MLPRACTICE_GLM_TIMEOUT";
pub const ENV_BLIND_MODE: &str = "MLPRACTICE_BLIND_MODE";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid value `{value}` for {var}: {reason}")]
    Env { var: &'static str, value: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub host: IpAddr,
    pub port: u16,
    /// Practices file; the bundled seed catalog when absent.
    pub corpus: Option<PathBuf>,
    /// Serialized index; a BM25 index is built at start-up when absent.
    pub index: Option<PathBuf>,
    pub feedback: PathBuf,
    pub blind_mode: bool,
    pub glm: GenerationEndpointConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: 8080,
            corpus: None,
            index: None,
            feedback: PathBuf::from("feedback.jsonl"),
            blind_mode: false,
            glm: GenerationEndpointConfig::default(),
        }
    }
}

fn parse_bool(var: &'static str, value: &str) -> Result<bool, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(ConfigError::Env { var, value: value.to_string(), reason: "expected true or false".into() }),
    }
}

fn parse_env<T: std::str::FromStr>(var: &'static str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e: T::Err| ConfigError::Env { var, value: value.to_string(), reason: e.to_string() })
}

impl ServiceConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Reads `path` when given (defaults otherwise), then applies overrides
    /// from `env`.
    pub fn load(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.into(), source })?;
                Self::from_toml_str(&text)?
            }
            None => ServiceConfig::default(),
        };
        config.apply_env(env)?;
        Ok(config)
    }

    /// [`ServiceConfig::load`] against the process environment.
    pub fn load_from_process(path: Option<&Path>) -> Result<Self, ConfigError> {
        Self::load(path, |k| std::env::var(k).ok())
    }

    pub fn apply_env(&mut self, env: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(v) = env(ENV_HOST) {
            self.host = parse_env(ENV_HOST, &v)?;
        }
        if let Some(v) = env(ENV_PORT) {
            self.port = parse_env(ENV_PORT, &v)?;
        }
        if let Some(v) = env(ENV_CORPUS) {
            self.corpus = Some(PathBuf::from(v));
        }
        if let Some(v) = env(ENV_INDEX) {
            self.index = Some(PathBuf::from(v));
        }
        if let Some(v) = env(ENV_FEEDBACK) {
            self.feedback = PathBuf::from(v);
        }
        if let Some(v) = env(ENV_GLM_URL) {
            self.glm.url = v;
        }
        if let Some(v) = env(ENV_GLM_TIMEOUT) {
            self.glm.timeout_secs = parse_env(ENV_GLM_TIMEOUT, &v)?;
        }
        if let Some(v) = env(ENV_BLIND_MODE) {
            self.blind_mode = parse_bool(ENV_BLIND_MODE, &v)?;
        }
        Ok(())
    }

    pub fn socket_addr(&self) -> SocketAddr {
        SocketAddr::new(self.host, self.port)
    }
}
