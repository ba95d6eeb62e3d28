//! JSON index files: a format tag, a version, the model kind and the full
//! index payload (parameters, vocabulary and postings or distributions).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Bm25Index, LdaIndex, ModelIndex, VsmIndex};

pub const INDEX_FORMAT: &str = "mlpractice-index";
pub const INDEX_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("index i/o failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("index file is not valid JSON for this format: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not an index file (format tag `{0}`)")]
    Format(String),
    #[error("unsupported index version {0} (expected {INDEX_VERSION})")]
    Version(u32),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "model", content = "index", rename_all = "lowercase")]
enum Payload {
    Bm25(Bm25Index),
    Vsm(VsmIndex),
    Lda(LdaIndex),
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    payload: Payload,
}

pub fn save_index<W: Write>(index: &ModelIndex, mut writer: W) -> Result<(), PersistError> {
    let payload = match index.clone() {
        ModelIndex::Bm25(i) => Payload::Bm25(i),
        ModelIndex::Vsm(i) => Payload::Vsm(i),
        ModelIndex::Lda(i) => Payload::Lda(i),
    };
    let file = IndexFile { format: INDEX_FORMAT.to_string(), version: INDEX_VERSION, payload };
    serde_json::to_writer(&mut writer, &file)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

pub fn load_index<R: Read>(reader: R) -> Result<ModelIndex, PersistError> {
    let value: serde_json::Value = serde_json::from_reader(reader)?;
    let format = value.get("format").and_then(|v| v.as_str()).unwrap_or_default();
    if format != INDEX_FORMAT {
        return Err(PersistError::Format(format.to_string()));
    }
    let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if version != INDEX_VERSION {
        return Err(PersistError::Version(version));
    }
    let file: IndexFile = serde_json::from_value(value)?;
    Ok(match file.payload {
        Payload::Bm25(i) => ModelIndex::Bm25(i),
        Payload::Vsm(i) => ModelIndex::Vsm(i),
        Payload::Lda(i) => ModelIndex::Lda(i),
    })
}
