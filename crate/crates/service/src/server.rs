//! Assembling state from configuration and running the HTTP server.

use std::fs::File;
use std::io::BufReader;
use std::sync::Arc;

use mlpractice_core::corpus::{load_catalog, CorpusError};
use mlpractice_core::glm::{GenerateError, Generator, HttpGenerator};
use mlpractice_core::retrieval::{load_index, PersistError, RetrievalError};
use mlpractice_core::{Catalog, IrEngine, ModelKind, ModelSpec, PipelineConfig};
use thiserror::Error;
use tokio::net::TcpListener;

use crate::api::{router, AppState};
use crate::config::ServiceConfig;
use crate::feedback::{FeedbackLog, FeedbackLogError};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot open {path}: {source}")]
    Open { path: String, source: std::io::Error },
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("index: {0}")]
    Index(#[from] PersistError),
    #[error("index does not match the corpus: practice `{0}` is unknown")]
    IndexMismatch(String),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Feedback(#[from] FeedbackLogError),
    #[error(transparent)]
    Generator(#[from] GenerateError),
    #[error("server i/o: {0}")]
    Io(#[from] std::io::Error),
}

fn open(path: &std::path::Path) -> Result<File, ServiceError> {
    File::open(path).map_err(|source| ServiceError::Open { path: path.display().to_string(), source })
}

pub fn load_corpus(config: &ServiceConfig) -> Result<Catalog, ServiceError> {
    match &config.corpus {
        Some(path) => Ok(load_catalog(BufReader::new(open(path)?))?),
        None => Ok(Catalog::seed()),
    }
}

/// Loads the configured index, or builds BM25 over `catalog`.
pub fn load_engine(config: &ServiceConfig, catalog: &Catalog) -> Result<IrEngine, ServiceError> {
    let pipeline = PipelineConfig::bundled();
    let Some(path) = &config.index else {
        return Ok(IrEngine::build(catalog, pipeline, &ModelSpec::from(ModelKind::Bm25))?);
    };
    let index = load_index(BufReader::new(open(path)?))?;
    if let Some(unknown) = index.doc_ids().iter().find(|id| !catalog.contains(id)) {
        return Err(ServiceError::IndexMismatch(unknown.clone()));
    }
    Ok(IrEngine::from_index(index, pipeline))
}

/// Builds the application state. Without an explicit `generator` the
/// configured HTTP endpoint is used.
pub fn build_state(config: &ServiceConfig, generator: Option<Arc<dyn Generator>>) -> Result<AppState, ServiceError> {
    let catalog = load_corpus(config)?;
    let engine = load_engine(config, &catalog)?;
    let generator = match generator {
        Some(g) => g,
        None => Arc::new(HttpGenerator::new(config.glm.clone())?),
    };
    let feedback = FeedbackLog::open(&config.feedback)?;
    Ok(AppState::new(catalog, engine, generator, feedback, config.blind_mode))
}

/// Serves until Ctrl-C.
pub async fn serve(listener: TcpListener, state: AppState) -> Result<(), ServiceError> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

pub async fn run(config: ServiceConfig, generator: Option<Arc<dyn Generator>>) -> Result<(), ServiceError> {
    let state = build_state(&config, generator)?;
    let listener = TcpListener::bind(config.socket_addr()).await?;
    eprintln!(
        "listening on http://{} ({} practices, blind mode {})",
        listener.local_addr()?,
        state.catalog().len(),
        if state.blind() { "on" } else { "off" }
    );
    serve(listener, state).await
}
