use std::path::PathBuf;
use std::sync::Arc;

use stockbabble_core::market_data::{load_fixtures, LiveProvider, MarketData, MarketDataError, DATA_URL_ENV};
use thiserror::Error;

pub const PORT_ENV: &str = "STOCKBABBLE_PORT";
pub const STORE_ENV: &str = "STOCKBABBLE_STORE";
pub const FIXTURES_ENV: &str = "STOCKBABBLE_FIXTURES";
pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_STORE: &str = "stockbabble-store.json";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{PORT_ENV}={0:?} is not a valid port number")]
    BadPort(String),
    #[error("no market data configured: pass --fixtures DIR, set {FIXTURES_ENV}, or set {DATA_URL_ENV} for the live service")]
    NoProvider,
    #[error("cannot load fixtures: {0}")]
    Fixtures(#[from] MarketDataError),
}

/// Settings for `serve`, from flags with environment fallbacks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub port: u16,
    pub store: PathBuf,
    pub fixtures: Option<PathBuf>,
}

impl ServiceConfig {
    /// Command-line values win over the environment, which wins over
    /// defaults.
    pub fn resolve(
        port: Option<u16>,
        store: Option<PathBuf>,
        fixtures: Option<PathBuf>,
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<Self, ConfigError> {
        let port = match port {
            Some(p) => p,
            None => match env(PORT_ENV).filter(|v| !v.trim().is_empty()) {
                Some(v) => v.trim().parse().map_err(|_| ConfigError::BadPort(v))?,
                None => DEFAULT_PORT,
            },
        };
        let store = store
            .or_else(|| env(STORE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_STORE));
        let fixtures = fixtures.or_else(|| env(FIXTURES_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
        Ok(Self { port, store, fixtures })
    }
}

/// Fixture directory if given, otherwise the live service if configured.
pub fn resolve_provider(fixtures: Option<&std::path::Path>) -> Result<Arc<dyn MarketData>, ConfigError> {
    if let Some(dir) = fixtures {
        return Ok(Arc::new(load_fixtures(dir)?));
    }
    LiveProvider::from_env()
        .map(|p| Arc::new(p) as Arc<dyn MarketData>)
        .ok_or(ConfigError::NoProvider)
}
