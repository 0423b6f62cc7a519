//! Passwords never reach the store file or the log stream.

mod common;

use std::io::Write;
use std::sync::{Arc, Mutex};

use axum::http::{Method, StatusCode};
use common::*;
use serde_json::json;

#[derive(Clone, Default)]
struct Capture(Arc<Mutex<Vec<u8>>>);

impl Write for Capture {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn passwords_absent_from_store_and_logs() {
    let capture = Capture::default();
    let writer = capture.clone();
    tracing_subscriber::fmt()
        .with_max_level(tracing::Level::TRACE)
        .with_writer(move || writer.clone())
        .init();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    let (app, _) = app_at(&path, clock());
    let secrets = ["Tr0ub4dor&3-unique", "hunter2hunter2-unique", "wrong-guess-unique"];
    let bearer = register_and_login(&app, "isabelle", secrets[0]).await;
    register_and_login(&app, "bob", secrets[1]).await;
    let bad = json!({"username": "isabelle", "password": secrets[2]}).to_string();
    assert_eq!(
        call(&app, Method::POST, "/api/login", None, &bad).await.0,
        StatusCode::UNAUTHORIZED
    );
    let weak = json!({"username": "carol", "password": "weak-x"}).to_string();
    call(&app, Method::POST, "/api/register", None, &weak).await;
    say(&app, &bearer, "Add 1 share of Apple to my portfolio").await;

    let store = std::fs::read_to_string(&path).unwrap();
    let logs = String::from_utf8(capture.0.lock().unwrap().clone()).unwrap();
    assert!(logs.contains("registered user"), "log capture is working");
    for secret in secrets.iter().chain(["weak-x"].iter()) {
        assert!(!store.contains(secret), "store leaks {secret}");
        assert!(!logs.contains(secret), "logs leak {secret}");
    }
    assert_eq!(store.matches("$argon2id$").count(), 2);
}
