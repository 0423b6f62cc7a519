#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use chrono::{TimeZone, Utc};
use serde_json::Value;
use stockbabble_core::market_data::load_fixtures;
use stockbabble_core::store::Store;
use stockbabble_core::ManualClock;
use stockbabble_service::{router, AppState};
use tower::ServiceExt;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures")
}

pub fn clock() -> Arc<ManualClock> {
    Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2021, 7, 1, 9, 0, 0).unwrap()))
}

pub fn app_at(store: &Path, clock: Arc<ManualClock>) -> (Router, Arc<AppState>) {
    let market = Arc::new(load_fixtures(fixtures_dir()).unwrap());
    let store = Arc::new(Store::open(store).unwrap());
    let state = Arc::new(AppState::new(market, store, clock).unwrap());
    (router(state.clone()), state)
}

pub async fn call(app: &Router, method: Method, path: &str, auth: Option<&str>, body: &str) -> (StatusCode, Value) {
    let mut request = Request::builder().method(method).uri(path);
    if let Some(auth) = auth {
        request = request.header("authorization", auth);
    }
    let request = request
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = axum::body::to_bytes(response.into_body(), usize::MAX).await.unwrap();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, value)
}

pub async fn register_and_login(app: &Router, username: &str, password: &str) -> String {
    let creds = serde_json::json!({"username": username, "password": password}).to_string();
    let (status, _) = call(app, Method::POST, "/api/register", None, &creds).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, body) = call(app, Method::POST, "/api/login", None, &creds).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    format!("Bearer {}", body["token"].as_str().unwrap())
}

pub async fn say(app: &Router, bearer: &str, text: &str) -> (StatusCode, Value) {
    call(
        app,
        Method::POST,
        "/api/message",
        Some(bearer),
        &serde_json::json!({ "text": text }).to_string(),
    )
    .await
}
