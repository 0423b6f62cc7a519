//! HTTP JSON API: registration, login, chat and portfolio valuation over a
//! shared dialogue engine and a single-file store.
//!
//! | Method | Path | Auth | Body |
//! |---|---|---|---|
//! | `POST` | `/api/register` | none | `{username, password}` |
//! | `POST` | `/api/login` | none | `{username, password}` |
//! | `POST` | `/api/message` | bearer | `{text}` |
//! | `GET` | `/api/portfolio` | bearer | |
//! | `GET` | `/api/health` | none | |

pub mod auth;
pub mod config;
pub mod error;
pub mod wire;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use stockbabble_core::dialogue::{ChatResponse, Engine, Session};
use stockbabble_core::knowledge::Glossary;
use stockbabble_core::market_data::{MarketData, MarketDataError};
use stockbabble_core::nlu::CorpusError;
use stockbabble_core::portfolio::{PortfolioBook, PortfolioError, Valuation};
use stockbabble_core::store::{Store, StoreError};
use stockbabble_core::Clock;

use crate::auth::{bad_credentials, bearer, hash_password, verify_password, TokenRegistry};
use crate::error::{ApiError, ErrorCode};
use crate::wire::{HealthResponse, LoginResponse, RegisterResponse};

pub use config::{resolve_provider, ConfigError, ServiceConfig};

/// Everything a request handler needs.
pub struct AppState {
    engine: Arc<Engine>,
    store: Arc<Store>,
    tokens: TokenRegistry,
    clock: Arc<dyn Clock>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

impl AppState {
    pub fn new(market: Arc<dyn MarketData>, store: Arc<Store>, clock: Arc<dyn Clock>) -> Result<Self, CorpusError> {
        let book = PortfolioBook::new(store.clone(), market.clone(), clock.clone());
        let engine = Engine::new(market, Arc::new(Glossary::shipped()), Some(book))?;
        Ok(Self {
            engine: Arc::new(engine),
            store,
            tokens: TokenRegistry::new(clock.clone()),
            clock,
            sessions: Mutex::new(HashMap::new()),
        })
    }

    pub fn engine(&self) -> &Arc<Engine> {
        &self.engine
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }

    fn session(&self, user_id: &str) -> Arc<Mutex<Session>> {
        self.sessions
            .lock()
            .unwrap()
            .entry(user_id.to_string())
            .or_insert_with(|| Arc::new(Mutex::new(Session::new(Some(user_id.to_string())))))
            .clone()
    }

    fn authenticate(&self, headers: &HeaderMap) -> Result<String, ApiError> {
        let value = headers.get(header::AUTHORIZATION).and_then(|v| v.to_str().ok());
        let user_id = self.tokens.check(bearer(value)?)?;
        match self.store.user(&user_id) {
            Some(_) => Ok(user_id),
            None => Err(auth::unauthorized()),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/register", post(register))
        .route("/api/login", post(login))
        .route("/api/message", post(message))
        .route("/api/portfolio", get(portfolio))
        .route("/api/health", get(health))
        .fallback(|| async { ApiError::new(ErrorCode::NotFound, "no such endpoint") })
        .with_state(state)
}

/// Serves `router(state)` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|_| ApiError::internal())?
}

fn store_error(e: StoreError) -> ApiError {
    match e {
        StoreError::UsernameTaken => ApiError::new(ErrorCode::UsernameTaken, "username already taken"),
        StoreError::UnknownUser(_) => auth::unauthorized(),
        other => {
            tracing::error!(error = %other, "store failure");
            ApiError::internal()
        }
    }
}

async fn register(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let creds = wire::decode_credentials(&body)?;
    wire::check_password_strength(&creds.password)?;
    let user = blocking(move || {
        if state.store.user_by_name(&creds.username).is_some() {
            return Err(store_error(StoreError::UsernameTaken));
        }
        let hash = hash_password(&creds.password);
        state
            .store
            .create_user(&creds.username, Some(hash), state.clock.now())
            .map_err(store_error)
    })
    .await?;
    tracing::info!(username = %user.username, user_id = %user.user_id, "registered user");
    Ok((StatusCode::CREATED, Json(RegisterResponse { user_id: user.user_id })).into_response())
}

async fn login(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<LoginResponse>, ApiError> {
    let creds = wire::decode_credentials(&body)?;
    let response = blocking(move || {
        let user = state.store.user_by_name(&creds.username);
        let stored = user.as_ref().and_then(|u| u.password_hash.as_deref());
        let verified = verify_password(&creds.password, stored.unwrap_or(state.tokens.decoy_hash()));
        match user {
            Some(user) if verified && stored.is_some() => {
                let (token, expires_at) = state.tokens.issue(&user.user_id);
                tracing::info!(username = %user.username, "login succeeded");
                Ok(LoginResponse {
                    token,
                    user_id: user.user_id,
                    expires_at,
                })
            }
            _ => {
                tracing::info!(username = %creds.username, "login rejected");
                Err(bad_credentials())
            }
        }
    })
    .await?;
    Ok(Json(response))
}

async fn message(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<ChatResponse>, ApiError> {
    let user_id = state.authenticate(&headers)?;
    let request = wire::decode_message(&body)?;
    let session = state.session(&user_id);
    let engine = state.engine.clone();
    let response = blocking(move || {
        let mut session = session.lock().unwrap();
        engine
            .handle(&mut session, &request.text)
            .map_err(|_| ApiError::new(ErrorCode::EmptyUtterance, "text has no words"))
    })
    .await?;
    Ok(Json(response))
}

async fn portfolio(State(state): State<Arc<AppState>>, headers: HeaderMap) -> Result<Json<Valuation>, ApiError> {
    let user_id = state.authenticate(&headers)?;
    let engine = state.engine.clone();
    let valuation = blocking(move || {
        let book = engine.portfolio().ok_or_else(ApiError::internal)?;
        book.value_portfolio(&user_id).map_err(|e| match e {
            PortfolioError::UnknownUser(_) => auth::unauthorized(),
            PortfolioError::MarketData(MarketDataError::ProviderUnavailable { reason, .. }) => {
                ApiError::new(ErrorCode::ProviderUnavailable, reason)
            }
            other => {
                tracing::error!(error = %other, "valuation failed");
                ApiError::internal()
            }
        })
    })
    .await?;
    Ok(Json(valuation))
}

async fn health(State(state): State<Arc<AppState>>) -> Json<HealthResponse> {
    Json(HealthResponse {
        status: "ok".into(),
        provider: state.engine.market().describe(),
    })
}
