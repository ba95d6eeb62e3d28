//! Usefulness feedback and its append-only JSON-lines log.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, SecondsFormat, Utc};
use mlpractice_core::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Useful,
    NotUseful,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackEvent {
    /// RFC 3339 in UTC. Filled in by the server when the client omits it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub query: String,
    pub engine_used: Engine,
    /// Practice id for IR results, title hash for generated ones.
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stars: Option<u8>,
}

#[derive(Debug, Error, PartialEq)]
pub enum InvalidFeedback {
    #[error("either verdict or stars is required")]
    NoSignal,
    #[error("stars must be between 1 and 5, got {0}")]
    Stars(u8),
    #[error("`{0}` must not be empty")]
    Empty(&'static str),
    #[error("timestamp `{0}` is not an RFC 3339 UTC time")]
    Timestamp(String),
}

impl FeedbackEvent {
    pub fn validate(&self) -> Result<(), InvalidFeedback> {
        if self.verdict.is_none() && self.stars.is_none() {
            return Err(InvalidFeedback::NoSignal);
        }
        if let Some(s) = self.stars {
            if !(1..=5).contains(&s) {
                return Err(InvalidFeedback::Stars(s));
            }
        }
        if self.query.trim().is_empty() {
            return Err(InvalidFeedback::Empty("query"));
        }
        if self.target.trim().is_empty() {
            return Err(InvalidFeedback::Empty("target"));
        }
        if let Some(ts) = &self.timestamp {
            let parsed = DateTime::parse_from_rfc3339(ts).map_err(|_| InvalidFeedback::Timestamp(ts.clone()))?;
            if parsed.offset().local_minus_utc() != 0 {
                return Err(InvalidFeedback::Timestamp(ts.clone()));
            }
        }
        Ok(())
    }

    /// Validates and stamps the event with the current time if it has none.
    pub fn prepared(mut self) -> Result<Self, InvalidFeedback> {
        self.validate()?;
        if self.timestamp.is_none() {
            self.timestamp = Some(Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true));
        }
        Ok(self)
    }
}

/// One log line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub id: String,
    #[serde(flatten)]
    pub event: FeedbackEvent,
}

#[derive(Debug, Error)]
pub enum FeedbackLogError {
    #[error("feedback log {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("feedback log line {line}: {source}")]
    Corrupt { line: usize, source: serde_json::Error },
}

/// Append-only log with a single writer. Each record is written as one
/// buffer; a failed write is rolled back to the previous length.
#[derive(Debug)]
pub struct FeedbackLog {
    path: PathBuf,
    file: Mutex<File>,
}

impl FeedbackLog {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, FeedbackLogError> {
        let path = path.into();
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|source| FeedbackLogError::Io { path: path.clone(), source })?;
        Ok(FeedbackLog { path, file: Mutex::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends `event` and returns the new record id.
    pub fn append(&self, event: FeedbackEvent) -> Result<String, FeedbackLogError> {
        let record = FeedbackRecord { id: uuid::Uuid::new_v4().to_string(), event };
        let mut line = serde_json::to_vec(&record).expect("feedback records always serialize");
        line.push(b'\n');
        let io_err = |source| FeedbackLogError::Io { path: self.path.clone(), source };

        let mut file = self.file.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
        let before = file.metadata().map_err(io_err)?.len();
        if let Err(e) = file.write_all(&line).and_then(|_| file.sync_data()) {
            let _ = file.set_len(before);
            return Err(io_err(e));
        }
        Ok(record.id)
    }
}

pub fn read_feedback(path: &Path) -> Result<Vec<FeedbackRecord>, FeedbackLogError> {
    let io_err = |source| FeedbackLogError::Io { path: path.to_path_buf(), source };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| FeedbackLogError::Corrupt { line: i + 1, source })?);
    }
    Ok(out)
}
