mod common;

use std::time::{Duration, Instant};

use common::*;
use mlpractice_core::glm::{parse_practices, FixtureSet};
use mlpractice_core::textproc::stem_token;
use reqwest::StatusCode;
use serde_json::{json, Value};

async fn get(url: &str) -> (StatusCode, Value) {
    let resp = reqwest::get(url).await.unwrap();
    let status = resp.status();
    (status, resp.json().await.unwrap())
}

async fn post(url: &str, body: &Value) -> (StatusCode, Value) {
    let resp = reqwest::Client::new().post(url).json(body).send().await.unwrap();
    let status = resp.status();
    (status, resp.json().await.unwrap())
}

fn error_code(body: &Value) -> &str {
    body["error"]["code"].as_str().unwrap()
}

async fn stub_service(blind: bool) -> TestService {
    let url = spawn_stub(fixtures(), Duration::ZERO).await;
    spawn_service(http_generator(&url, 5.0), blind).await
}

#[tokio::test(flavor = "multi_thread")]
async fn ir_search_on_seed_corpus() {
    let svc = stub_service(false).await;
    let (status, body) = get(&svc.url("/api/search?q=data%20cleaning&engine=ir")).await;
    assert_eq!(status, StatusCode::OK);
    assert!(schema_validator().is_valid(&body));
    assert_eq!(body["engine"], "ir");
    let results = body["results"].as_array().unwrap();
    assert!(!results.is_empty() && results.len() <= 10);
    for r in results {
        assert!(r["task"].is_string() && r["score"].is_number() && r["engine"] == "ir");
    }
    let top_title = results[0]["title"].as_str().unwrap().to_lowercase();
    assert!(top_title.split(|c: char| !c.is_alphanumeric()).any(|w| stem_token(w) == stem_token("clean")));
}

#[tokio::test(flavor = "multi_thread")]
async fn ir_is_the_default_engine_and_k_limits() {
    let svc = stub_service(false).await;
    let (_, body) = get(&svc.url("/api/search?q=model&k=2")).await;
    assert_eq!(body["engine"], "ir");
    assert_eq!(body["results"].as_array().unwrap().len(), 2);
}

#[tokio::test(flavor = "multi_thread")]
async fn glm_search_through_stub_endpoint() {
    let svc = stub_service(false).await;
    let (status, body) = get(&svc.url("/api/search?q=data%20cleaning&engine=glm")).await;
    assert_eq!(status, StatusCode::OK);
    assert!(schema_validator().is_valid(&body));
    assert_eq!(body["engine"], "glm");
    let fixture = fixture_json("02_data_cleaning.json");
    let expected = parse_practices(fixture["completion"].as_str().unwrap());
    let results = body["results"].as_array().unwrap();
    assert_eq!(results.len(), expected.len());
    for (r, e) in results.iter().zip(&expected) {
        assert_eq!(r["title"], e.title.as_str());
        assert_eq!(r["description"].as_str(), e.description.as_deref());
        assert!(r.get("task").is_none() && r.get("score").is_none());
        assert!(r["id"].as_str().unwrap().starts_with("glm-"));
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn zero_overlap_query_returns_empty_list() {
    let svc = stub_service(false).await;
    let (status, body) = get(&svc.url("/api/search?q=zzzz%20qqqq&engine=ir")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["results"], json!([]));
    assert!(schema_validator().is_valid(&body));
}

#[tokio::test(flavor = "multi_thread")]
async fn bad_search_requests_are_rejected() {
    let svc = stub_service(false).await;
    for (path, code) in [
        ("/api/search", "invalid_query"),
        ("/api/search?q=", "invalid_query"),
        ("/api/search?q=%20%20", "invalid_query"),
        ("/api/search?q=x&k=0", "invalid_k"),
        ("/api/search?q=x&k=51", "invalid_k"),
        ("/api/search?q=x&k=ten", "invalid_k"),
        ("/api/search?q=x&engine=web", "invalid_engine"),
    ] {
        let (status, body) = get(&svc.url(path)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{path}");
        assert_eq!(error_code(&body), code, "{path}");
    }
    let (status, _) = get(&svc.url("/api/search?q=x&k=50")).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test(flavor = "multi_thread")]
async fn glm_failures_map_to_bad_gateway() {
    let unreachable = spawn_service(http_generator("http://127.0.0.1:1/generate", 2.0), false).await;
    let (status, body) = get(&unreachable.url("/api/search?q=x&engine=glm")).await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert_eq!(error_code(&body), "glm_unreachable");
    assert!(body.get("results").is_none());

    let slow = spawn_stub(fixtures(), Duration::from_secs(3)).await;
    let timing_out = spawn_service(http_generator(&slow, 0.3), false).await;
    let (status, body) = get(&timing_out.url("/api/search?q=x&engine=glm")).await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert_eq!(error_code(&body), "glm_timeout");

    let no_fixture = spawn_stub(FixtureSet::new(), Duration::ZERO).await;
    let missing = spawn_service(http_generator(&no_fixture, 2.0), false).await;
    let (status, body) = get(&missing.url("/api/search?q=x&engine=glm")).await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert_eq!(error_code(&body), "glm_bad_status");
}

#[tokio::test(flavor = "multi_thread")]
async fn ir_search_is_not_blocked_by_slow_generation() {
    let slow = spawn_stub(fixtures(), Duration::from_secs(3)).await;
    let svc = spawn_service(http_generator(&slow, 30.0), false).await;
    let glm_url = svc.url("/api/search?q=data%20cleaning&engine=glm");
    let pending = tokio::spawn(async move { get(&glm_url).await });
    tokio::time::sleep(Duration::from_millis(100)).await;

    let started = Instant::now();
    let (status, _) = get(&svc.url("/api/search?q=data%20cleaning&engine=ir")).await;
    assert_eq!(status, StatusCode::OK);
    assert!(started.elapsed() < Duration::from_secs(1), "IR waited {:?}", started.elapsed());
    assert!(!pending.is_finished());
    assert_eq!(pending.await.unwrap().0, StatusCode::OK);
}

#[tokio::test(flavor = "multi_thread")]
async fn practices_and_stages() {
    let svc = stub_service(false).await;
    let (_, all) = get(&svc.url("/api/practices")).await;
    let all = all["practices"].as_array().unwrap();
    assert_eq!(all.len(), mlpractice_core::Catalog::seed().len());

    let (_, cleaning) = get(&svc.url("/api/practices?stage=DataCleaning")).await;
    let cleaning = cleaning["practices"].as_array().unwrap();
    assert!(!cleaning.is_empty());
    assert!(cleaning.iter().all(|p| p["stage"] == "DataCleaning"));

    let task = cleaning[0]["task"].as_str().unwrap().to_string();
    let (_, by_task) = get(&svc.url(&format!("/api/practices?stage=DataCleaning&task={task}"))).await;
    assert!(by_task["practices"].as_array().unwrap().iter().all(|p| p["task"] == task.as_str()));

    let (status, body) = get(&svc.url("/api/practices?stage=Bogus")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "invalid_stage");
    assert!(body["error"]["message"].as_str().unwrap().contains("Bogus"));

    let (_, stages) = get(&svc.url("/api/stages")).await;
    let names: Vec<&str> = stages["stages"].as_array().unwrap().iter().map(|s| s["stage"].as_str().unwrap()).collect();
    let expected: Vec<&str> = mlpractice_core::Stage::ALL.iter().map(|s| s.as_str()).collect();
    assert_eq!(names, expected);
    assert!(stages["note"].as_str().unwrap().contains("only available for the IR practice corpus"));
}

#[tokio::test(flavor = "multi_thread")]
async fn feedback_round_trips_verbatim() {
    let svc = stub_service(false).await;
    let first = json!({
        "timestamp": "2024-05-01T10:00:00Z",
        "query": "data cleaning",
        "engine_used": "ir",
        "target": "p05",
        "verdict": "useful"
    });
    let second = json!({
        "timestamp": "2024-05-01T10:00:05.250Z",
        "query": "data cleaning",
        "engine_used": "glm",
        "target": "glm-0123456789abcdef",
        "stars": 4
    });
    let (status, ack1) = post(&svc.url("/api/feedback"), &first).await;
    assert_eq!(status, StatusCode::CREATED);
    let (_, ack2) = post(&svc.url("/api/feedback"), &second).await;

    let text = std::fs::read_to_string(&svc.feedback_path).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    for (line, (sent, ack)) in lines.iter().zip([(&first, &ack1), (&second, &ack2)]) {
        let mut line = line.clone();
        let id = line.as_object_mut().unwrap().remove("id").unwrap();
        assert_eq!(&id, &ack["id"]);
        assert_eq!(&line, sent);
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn feedback_without_timestamp_is_stamped() {
    let svc = stub_service(false).await;
    let (status, _) = post(
        &svc.url("/api/feedback"),
        &json!({"query": "q", "engine_used": "ir", "target": "p01", "verdict": "not_useful"}),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    let line: Value = serde_json::from_str(std::fs::read_to_string(&svc.feedback_path).unwrap().trim()).unwrap();
    assert!(line["timestamp"].as_str().unwrap().ends_with('Z'));
}

#[tokio::test(flavor = "multi_thread")]
async fn invalid_feedback_is_rejected_without_writing() {
    let svc = stub_service(false).await;
    let base = json!({"query": "q", "engine_used": "ir", "target": "p01"});
    let mut bodies = vec![base.clone()];
    for (k, v) in [("stars", json!(6)), ("stars", json!(0)), ("verdict", json!("meh")), ("engine_used", json!("web"))] {
        let mut b = base.clone();
        b[k] = v;
        bodies.push(b);
    }
    for body in &bodies {
        let (status, resp) = post(&svc.url("/api/feedback"), body).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(error_code(&resp), "invalid_feedback");
    }
    assert_eq!(std::fs::read_to_string(&svc.feedback_path).unwrap(), "");
}

#[cfg(target_os = "linux")]
#[tokio::test(flavor = "multi_thread")]
async fn feedback_write_failure_is_a_server_error() {
    let url = spawn_stub(fixtures(), Duration::ZERO).await;
    let dir = tempfile::tempdir().unwrap();
    let svc = spawn_service_with_log(http_generator(&url, 5.0), false, "/dev/full".into(), dir).await;
    let (status, body) =
        post(&svc.url("/api/feedback"), &json!({"query": "q", "engine_used": "ir", "target": "p01", "stars": 3})).await;
    assert_eq!(status, StatusCode::INTERNAL_SERVER_ERROR);
    assert_eq!(error_code(&body), "feedback_write_failed");
}

#[tokio::test(flavor = "multi_thread")]
async fn blind_mode_hides_the_engine() {
    let svc = stub_service(true).await;
    for engine in ["ir", "glm"] {
        let resp = reqwest::get(svc.url(&format!("/api/search?q=data%20cleaning&engine={engine}"))).await.unwrap();
        assert_eq!(resp.status(), StatusCode::OK);
        let bytes = resp.bytes().await.unwrap();
        assert!(!bytes.windows(6).any(|w| w == b"engine"), "{engine}");
        let body: Value = serde_json::from_slice(&bytes).unwrap();
        assert!(!body["results"].as_array().unwrap().is_empty());
        assert!(schema_validator().is_valid(&body));
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn read_endpoints_do_not_mutate_state() {
    let svc = stub_service(false).await;
    let snapshot = || async {
        (
            get(&svc.url("/api/practices")).await.1,
            get(&svc.url("/api/stages")).await.1,
            get(&svc.url("/api/search?q=monitor%20drift")).await.1,
        )
    };
    let before = snapshot().await;
    for q in ["data", "model training", "zzzz"] {
        get(&svc.url(&format!("/api/search?q={q}"))).await;
        get(&svc.url(&format!("/api/search?q={q}&engine=glm"))).await;
    }
    assert_eq!(snapshot().await, before);
    assert_eq!(std::fs::metadata(&svc.feedback_path).unwrap().len(), 0);
}

#[tokio::test(flavor = "multi_thread")]
async fn schemas_are_published() {
    let svc = stub_service(false).await;
    let (status, schema) = get(&svc.url("/api/schema/search-response")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(schema["title"], "SearchResponse");
    let (_, fb) = get(&svc.url("/api/schema/feedback-event")).await;
    assert_eq!(fb["title"], "FeedbackEvent");
}
