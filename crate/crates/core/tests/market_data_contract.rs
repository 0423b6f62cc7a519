//! One behavioural contract, run against both providers. The live provider
//! talks to an in-process mock of the data service that serves the same
//! fixture files.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::{Duration, TimeZone, Utc};
use serde_json::{json, Value};
use stockbabble_core::market_data::{load_fixtures, FixtureProvider, LiveProvider, MarketData, MarketDataError};
use stockbabble_core::ManualClock;

const KEY: &str = "test-key";

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures")
}

fn contract(provider: &dyn MarketData) {
    let acme = provider.candles("ACME", 5).unwrap();
    assert_eq!(acme.len(), 5);
    let all = provider.candles("ACME", 10_000).unwrap();
    assert_eq!(acme.candles(), &all.candles()[all.len() - 5..]);
    assert!(acme.candles().windows(2).all(|w| w[0].timestamp < w[1].timestamp));
    assert!(matches!(
        provider.candles("acme", 0),
        Err(MarketDataError::InvalidArgument(_))
    ));
    assert!(matches!(
        provider.candles("NOPE", 5),
        Err(MarketDataError::UnknownTicker(_))
    ));

    let quote = provider.quote("acme").unwrap();
    assert_eq!(quote.ticker, "ACME");
    assert_eq!(quote.price, all.latest().unwrap().close);
    assert!(quote.price > 0.0);
    assert!(matches!(provider.quote("NOPE"), Err(MarketDataError::UnknownTicker(_))));

    let fb = provider.profile("FB").unwrap();
    assert_eq!(fb.ceo, "Mark Zuckerberg");
    let acme_profile = provider.profile("ACME").unwrap();
    assert_eq!(acme_profile.annual_dividend, 0.0);
    assert!(!acme_profile.dividend_reported);

    let news = provider.news("AAPL", 3).unwrap();
    assert_eq!(news.len(), 3);
    assert!(news.windows(2).all(|w| {
        w[0].published_at > w[1].published_at
            || (w[0].published_at == w[1].published_at && w[0].headline <= w[1].headline)
    }));
    let all_news = provider.news("AAPL", 100).unwrap();
    assert_eq!(&all_news[..3], &news[..]);
    assert!(provider.news("ACME", 5).unwrap().is_empty());
    assert!(matches!(
        provider.news("AAPL", 0),
        Err(MarketDataError::InvalidArgument(_))
    ));
}

#[test]
fn fixture_provider_meets_contract() {
    contract(&load_fixtures(fixtures_dir()).unwrap());
}

#[derive(Clone)]
struct Upstream {
    fixtures: Arc<FixtureProvider>,
    profiles: Arc<Vec<Value>>,
    news: Arc<Vec<Value>>,
}

fn authorised(headers: &HeaderMap) -> Result<(), StatusCode> {
    match headers.get("x-api-key").and_then(|v| v.to_str().ok()) {
        Some(KEY) => Ok(()),
        _ => Err(StatusCode::UNAUTHORIZED),
    }
}

fn not_found() -> Response {
    StatusCode::NOT_FOUND.into_response()
}

async fn candles(
    State(up): State<Upstream>,
    headers: HeaderMap,
    Path(ticker): Path<String>,
    Query(q): Query<std::collections::HashMap<String, usize>>,
) -> Response {
    if let Err(r) = authorised(&headers) {
        return r.into_response();
    }
    let Ok(series) = up.fixtures.candles(&ticker, q.get("days").copied().unwrap_or(30)) else {
        return not_found();
    };
    let rows: Vec<Value> = series
        .candles()
        .iter()
        .map(|c| {
            json!({"date": c.timestamp.format("%Y-%m-%d").to_string(), "open": c.open, "high": c.high,
                   "low": c.low, "close": c.close, "volume": c.volume})
        })
        .collect();
    Json(rows).into_response()
}

async fn quote(State(up): State<Upstream>, headers: HeaderMap, Path(ticker): Path<String>) -> Response {
    if let Err(r) = authorised(&headers) {
        return r.into_response();
    }
    match up.fixtures.quote(&ticker) {
        Ok(q) => Json(q).into_response(),
        Err(_) => not_found(),
    }
}

async fn profile(State(up): State<Upstream>, headers: HeaderMap, Path(ticker): Path<String>) -> Response {
    if let Err(r) = authorised(&headers) {
        return r.into_response();
    }
    match up.profiles.iter().find(|p| p["ticker"] == ticker.to_uppercase()) {
        Some(p) => Json(p.clone()).into_response(),
        None => not_found(),
    }
}

async fn news(State(up): State<Upstream>, headers: HeaderMap, Path(ticker): Path<String>) -> Response {
    if let Err(r) = authorised(&headers) {
        return r.into_response();
    }
    let ticker = ticker.to_uppercase();
    if up.fixtures.quote(&ticker).is_err() {
        return not_found();
    }
    let items: Vec<Value> = up.news.iter().filter(|n| n["ticker"] == ticker).cloned().collect();
    Json(items).into_response()
}

fn spawn_upstream() -> SocketAddr {
    let dir = fixtures_dir();
    let read = |name: &str| -> Arc<Vec<Value>> {
        Arc::new(serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap())
    };
    let state = Upstream {
        fixtures: Arc::new(load_fixtures(&dir).unwrap()),
        profiles: read("profiles.json"),
        news: read("news.json"),
    };
    let app = Router::new()
        .route("/v1/candles/{ticker}", get(candles))
        .route("/v1/quote/{ticker}", get(quote))
        .route("/v1/profile/{ticker}", get(profile))
        .route("/v1/news/{ticker}", get(news))
        .with_state(state);
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_current_thread()
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    addr
}

#[test]
fn live_provider_meets_contract() {
    let addr = spawn_upstream();
    contract(&LiveProvider::new(format!("http://{addr}"), Some(KEY.into())));
}

#[test]
fn live_provider_caches_for_fifteen_minutes() {
    let addr = spawn_upstream();
    let clock = Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2021, 7, 1, 9, 0, 0).unwrap()));
    let live = LiveProvider::with_clock(format!("http://{addr}"), Some(KEY.into()), clock.clone());
    live.quote("AAPL").unwrap();
    live.quote("AAPL").unwrap();
    assert_eq!(live.upstream_calls(), 1);
    clock.advance(Duration::minutes(14));
    live.quote("AAPL").unwrap();
    assert_eq!(live.upstream_calls(), 1);
    clock.advance(Duration::minutes(2));
    live.quote("AAPL").unwrap();
    assert_eq!(live.upstream_calls(), 2);
    live.candles("AAPL", 5).unwrap();
    live.candles("AAPL", 6).unwrap();
    assert_eq!(live.upstream_calls(), 4);
}

#[test]
fn live_provider_reports_auth_problems() {
    let addr = spawn_upstream();
    let missing = LiveProvider::new(format!("http://{addr}"), None);
    match missing.quote("AAPL") {
        Err(MarketDataError::ProviderUnavailable { hint: Some(hint), .. }) => {
            assert!(hint.contains("STOCKBABBLE_DATA_KEY"))
        }
        other => panic!("{other:?}"),
    }
    let wrong = LiveProvider::new(format!("http://{addr}"), Some("nope".into()));
    assert!(matches!(
        wrong.quote("AAPL"),
        Err(MarketDataError::ProviderUnavailable { .. })
    ));
}

#[test]
fn live_provider_unreachable_is_unavailable() {
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let live = LiveProvider::new(format!("http://127.0.0.1:{port}"), Some(KEY.into()));
    assert!(matches!(
        live.candles("AAPL", 5),
        Err(MarketDataError::ProviderUnavailable { .. })
    ));
}
