//! Stand-in generation endpoint that replays recorded fixtures over HTTP.

use std::sync::Arc;
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::{Json, Router};
use mlpractice_core::glm::{FixtureSet, GenerateRequest, GenerateResponse};

#[derive(Clone)]
struct StubState {
    fixtures: Arc<FixtureSet>,
    delay: Duration,
}

/// `POST /generate`: waits `delay`, then answers with the fixture recorded
/// for the prompt, or 404 when there is none.
pub fn stub_generation_router(fixtures: FixtureSet, delay: Duration) -> Router {
    Router::new().route("/generate", post(generate)).with_state(StubState { fixtures: Arc::new(fixtures), delay })
}

async fn generate(
    State(state): State<StubState>,
    Json(req): Json<GenerateRequest>,
) -> Result<Json<GenerateResponse>, StatusCode> {
    if !state.delay.is_zero() {
        tokio::time::sleep(state.delay).await;
    }
    let text = state.fixtures.lookup(&req.prompt).ok_or(StatusCode::NOT_FOUND)?;
    Ok(Json(GenerateResponse { text: text.to_string() }))
}
