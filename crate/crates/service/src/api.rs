//! HTTP routes and handlers.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mlpractice_core::corpus::{Practice, Stage};
use mlpractice_core::glm::{build_prompt, parse_practices, Generator};
use mlpractice_core::{homogenize, AnswerSource, Catalog, Engine, IrEngine, SearchResponse};
use serde::Serialize;
use serde_json::json;

use crate::feedback::{FeedbackEvent, FeedbackLog};

pub const DEFAULT_K: usize = 10;
pub const MAX_K: usize = 50;
pub const STAGES_NOTE: &str = "Stage browsing is only available for the IR practice corpus.";
pub const SEARCH_RESPONSE_SCHEMA: &str = include_str!("../schema/search_response.schema.json");
pub const FEEDBACK_EVENT_SCHEMA: &str = include_str!("../schema/feedback_event.schema.json");

/// Shared, read-only search state plus the feedback writer.
#[derive(Clone)]
pub struct AppState {
    catalog: Arc<Catalog>,
    engine: Arc<IrEngine>,
    generator: Arc<dyn Generator>,
    feedback: Arc<FeedbackLog>,
    blind: bool,
}

impl AppState {
    pub fn new(
        catalog: Catalog,
        engine: IrEngine,
        generator: Arc<dyn Generator>,
        feedback: FeedbackLog,
        blind: bool,
    ) -> Self {
        AppState {
            catalog: Arc::new(catalog),
            engine: Arc::new(engine),
            generator,
            feedback: Arc::new(feedback),
            blind,
        }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn blind(&self) -> bool {
        self.blind
    }
}

/// Error body: `{"error": {"code": ..., "message": ...}}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/search", get(search))
        .route("/api/practices", get(list_practices))
        .route("/api/stages", get(stages))
        .route("/api/feedback", post(feedback))
        .route("/api/schema/search-response", get(|| schema(SEARCH_RESPONSE_SCHEMA)))
        .route("/api/schema/feedback-event", get(|| schema(FEEDBACK_EVENT_SCHEMA)))
        .with_state(state)
}

async fn schema(body: &'static str) -> Response {
    ([(header::CONTENT_TYPE, "application/schema+json")], body).into_response()
}

type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

fn params(p: Params) -> Result<HashMap<String, String>, ApiError> {
    p.map(|Query(m)| m).map_err(|e| ApiError::bad_request("invalid_parameters", e.body_text()))
}

fn parse_k(raw: Option<&String>) -> Result<usize, ApiError> {
    let Some(raw) = raw else { return Ok(DEFAULT_K) };
    match raw.trim().parse::<usize>() {
        Ok(k) if (1..=MAX_K).contains(&k) => Ok(k),
        _ => Err(ApiError::bad_request("invalid_k", format!("k must be an integer in 1..={MAX_K}, got `{raw}`"))),
    }
}

async fn search(State(state): State<AppState>, p: Params) -> Result<Json<SearchResponse>, ApiError> {
    let p = params(p)?;
    let q = p.get("q").map(String::as_str).unwrap_or_default();
    if q.trim().is_empty() {
        return Err(ApiError::bad_request("invalid_query", "query parameter `q` must be non-empty"));
    }
    let engine = match p.get("engine") {
        None => Engine::Ir,
        Some(e) => e.parse().map_err(|m: String| ApiError::bad_request("invalid_engine", m))?,
    };
    let k = parse_k(p.get("k"))?;

    let response = match engine {
        Engine::Ir => search_ir(&state, q.to_string(), k).await?,
        Engine::Glm => search_glm(&state, q, k).await?,
    };
    Ok(Json(if state.blind { response.blind() } else { response }))
}

async fn search_ir(state: &AppState, q: String, k: usize) -> Result<SearchResponse, ApiError> {
    let engine = Arc::clone(&state.engine);
    let catalog = Arc::clone(&state.catalog);
    tokio::task::spawn_blocking(move || {
        let ranked = engine.search(&q, k).map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(homogenize(&q, AnswerSource::Ir { results: &ranked, catalog: &catalog }))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
}

async fn search_glm(state: &AppState, q: &str, k: usize) -> Result<SearchResponse, ApiError> {
    let prompt = build_prompt(q).map_err(|e| ApiError::bad_request("invalid_query", e.to_string()))?;
    let completion = state
        .generator
        .generate(&prompt)
        .await
        .map_err(|e| ApiError::new(StatusCode::BAD_GATEWAY, e.code(), e.to_string()))?;
    let mut practices = parse_practices(&completion);
    practices.truncate(k);
    Ok(homogenize(q, AnswerSource::Glm(&practices)))
}

#[derive(Serialize)]
struct PracticeList<'a> {
    practices: Vec<&'a Practice>,
}

async fn list_practices(State(state): State<AppState>, p: Params) -> Result<Response, ApiError> {
    let p = params(p)?;
    let stage = match p.get("stage").filter(|s| !s.is_empty()) {
        None => None,
        Some(s) => Some(s.parse::<Stage>().map_err(|e| ApiError::bad_request("invalid_stage", e.to_string()))?),
    };
    let task = p.get("task").map(String::as_str).filter(|t| !t.is_empty());
    Ok(Json(PracticeList { practices: state.catalog.filter(stage, task) }).into_response())
}

#[derive(Serialize)]
struct StageGroup<'a> {
    stage: Stage,
    practices: Vec<&'a Practice>,
}

#[derive(Serialize)]
struct StagesBody<'a> {
    note: &'static str,
    stages: Vec<StageGroup<'a>>,
}

async fn stages(State(state): State<AppState>) -> Response {
    let stages =
        state.catalog.group_by_stage().into_iter().map(|(stage, practices)| StageGroup { stage, practices }).collect();
    Json(StagesBody { note: STAGES_NOTE, stages }).into_response()
}

async fn feedback(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let event: FeedbackEvent =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request("invalid_feedback", e.to_string()))?;
    let event = event.prepared().map_err(|e| ApiError::bad_request("invalid_feedback", e.to_string()))?;
    let log = Arc::clone(&state.feedback);
    let id = tokio::task::spawn_blocking(move || log.append(event))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "feedback_write_failed", e.to_string()))?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))).into_response())
}
