#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use mlpractice_core::glm::{FixtureSet, GenerationEndpointConfig, Generator, HttpGenerator};
use mlpractice_core::{Catalog, IrEngine, ModelKind, ModelSpec, PipelineConfig};
use mlpractice_service::stub::stub_generation_router;
use mlpractice_service::{router, AppState, FeedbackLog, SEARCH_RESPONSE_SCHEMA};
use tempfile::TempDir;
use tokio::net::TcpListener;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/glm")
}

pub fn fixtures() -> FixtureSet {
    FixtureSet::load_dir(&fixture_dir()).expect("glm fixtures load")
}

pub fn fixture_json(name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(fixture_dir().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn schema_validator() -> jsonschema::Validator {
    jsonschema::validator_for(&serde_json::from_str(SEARCH_RESPONSE_SCHEMA).unwrap()).unwrap()
}

async fn bind() -> (TcpListener, String) {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    (listener, format!("http://{addr}"))
}

/// Serves the fixture stub with the given delay; returns its `/generate` URL.
pub async fn spawn_stub(fixtures: FixtureSet, delay: Duration) -> String {
    let (listener, base) = bind().await;
    tokio::spawn(async move { axum::serve(listener, stub_generation_router(fixtures, delay)).await.unwrap() });
    format!("{base}/generate")
}

pub fn http_generator(url: &str, timeout_secs: f64) -> Arc<dyn Generator> {
    let config = GenerationEndpointConfig { url: url.to_string(), timeout_secs, ..Default::default() };
    Arc::new(HttpGenerator::new(config).unwrap())
}

pub struct TestService {
    pub base: String,
    pub feedback_path: PathBuf,
    _dir: TempDir,
}

impl TestService {
    pub fn url(&self, path_and_query: &str) -> String {
        format!("{}{}", self.base, path_and_query)
    }
}

/// Seed catalog, BM25, the given generator and a fresh feedback log.
pub async fn spawn_service(generator: Arc<dyn Generator>, blind: bool) -> TestService {
    let dir = tempfile::tempdir().unwrap();
    spawn_service_with_log(generator, blind, dir.path().join("feedback.jsonl"), dir).await
}

pub async fn spawn_service_with_log(
    generator: Arc<dyn Generator>,
    blind: bool,
    feedback_path: PathBuf,
    dir: TempDir,
) -> TestService {
    let catalog = Catalog::seed();
    let engine = IrEngine::build(&catalog, PipelineConfig::bundled(), &ModelSpec::from(ModelKind::Bm25)).unwrap();
    let log = FeedbackLog::open(&feedback_path).unwrap();
    let state = AppState::new(catalog, engine, generator, log, blind);
    let (listener, base) = bind().await;
    tokio::spawn(async move { axum::serve(listener, router(state)).await.unwrap() });
    TestService { base, feedback_path, _dir: dir }
}
