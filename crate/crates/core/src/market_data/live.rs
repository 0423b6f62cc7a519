use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration as StdDuration;

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::{
    normalize_ticker, sort_news, Candle, CandleSeries, CompanyProfile, MarketData, MarketDataError, NewsItem, Quote,
    Result,
};
use crate::clock::{Clock, SystemClock};

pub const DATA_URL_ENV: &str = "STOCKBABBLE_DATA_URL";
pub const DATA_KEY_ENV: &str = "STOCKBABBLE_DATA_KEY";

/// How long a live response is reused before the upstream is asked again.
pub const CACHE_TTL: Duration = Duration::minutes(15);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Query {
    Candles(usize),
    Quote,
    Profile,
    News(usize),
}

#[derive(Debug, Clone)]
enum Cached {
    Candles(CandleSeries),
    Quote(Quote),
    Profile(CompanyProfile),
    News(Vec<NewsItem>),
}

type Cache = HashMap<(String, Query), (DateTime<Utc>, Cached)>;

#[derive(Deserialize)]
struct WireCandle {
    date: NaiveDate,
    open: f64,
    high: f64,
    low: f64,
    close: f64,
    volume: u64,
}

/// Client for an HTTP market-data service.
///
/// Endpoints (all `GET`, authenticated with an `X-Api-Key` header):
/// `/v1/candles/{TICKER}?days=N`, `/v1/quote/{TICKER}`,
/// `/v1/profile/{TICKER}` and `/v1/news/{TICKER}?limit=N`. A 404 means the
/// ticker is unknown.
pub struct LiveProvider {
    base_url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
    clock: Arc<dyn Clock>,
    cache: Mutex<Cache>,
    upstream_calls: Mutex<u64>,
}

impl LiveProvider {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>) -> Self {
        Self::with_clock(base_url, api_key, Arc::new(SystemClock))
    }

    pub fn with_clock(base_url: impl Into<String>, api_key: Option<String>, clock: Arc<dyn Clock>) -> Self {
        Self {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key: api_key.filter(|k| !k.trim().is_empty()),
            agent: ureq::AgentBuilder::new().timeout(StdDuration::from_secs(10)).build(),
            clock,
            cache: Mutex::new(HashMap::new()),
            upstream_calls: Mutex::new(0),
        }
    }

    /// Reads the base URL and key from the environment. Returns `None` when
    /// no base URL is configured; a missing key is reported on first use.
    pub fn from_env() -> Option<Self> {
        let url = std::env::var(DATA_URL_ENV).ok().filter(|u| !u.trim().is_empty())?;
        Some(Self::new(url, std::env::var(DATA_KEY_ENV).ok()))
    }

    /// Number of requests that actually reached the upstream service.
    pub fn upstream_calls(&self) -> u64 {
        *self.upstream_calls.lock().unwrap()
    }

    fn fetch<T: DeserializeOwned>(&self, ticker: &str, path: &str, query: Option<(&str, usize)>) -> Result<T> {
        let key = self
            .api_key
            .as_deref()
            .ok_or_else(|| MarketDataError::ProviderUnavailable {
                reason: "no API key configured".into(),
                hint: Some(format!("set {DATA_KEY_ENV} to the data service API key")),
            })?;
        let url = format!("{}/v1/{}/{}", self.base_url, path, ticker);
        let mut request = self.agent.get(&url).set("X-Api-Key", key);
        if let Some((name, value)) = query {
            request = request.query(name, &value.to_string());
        }
        *self.upstream_calls.lock().unwrap() += 1;
        match request.call() {
            Ok(response) => response
                .into_json::<T>()
                .map_err(|e| MarketDataError::ProviderUnavailable {
                    reason: format!("unreadable response from {url}: {e}"),
                    hint: None,
                }),
            Err(ureq::Error::Status(404, _)) => Err(MarketDataError::UnknownTicker(ticker.to_string())),
            Err(ureq::Error::Status(code @ (401 | 403), _)) => Err(MarketDataError::ProviderUnavailable {
                reason: format!("data service rejected credentials (HTTP {code})"),
                hint: Some(format!("check {DATA_KEY_ENV}")),
            }),
            Err(ureq::Error::Status(code, _)) => Err(MarketDataError::ProviderUnavailable {
                reason: format!("data service answered HTTP {code}"),
                hint: None,
            }),
            Err(ureq::Error::Transport(t)) => Err(MarketDataError::ProviderUnavailable {
                reason: t.to_string(),
                hint: Some(format!("check {DATA_URL_ENV}")),
            }),
        }
    }

    fn cached(&self, ticker: &str, query: Query, load: impl FnOnce() -> Result<Cached>) -> Result<Cached> {
        let key = (ticker.to_string(), query);
        let now = self.clock.now();
        if let Some((at, value)) = self.cache.lock().unwrap().get(&key) {
            if now - *at < CACHE_TTL {
                return Ok(value.clone());
            }
        }
        let value = load()?;
        self.cache.lock().unwrap().insert(key, (now, value.clone()));
        Ok(value)
    }
}

impl MarketData for LiveProvider {
    fn candles(&self, ticker: &str, lookback: usize) -> Result<CandleSeries> {
        if lookback == 0 {
            return Err(MarketDataError::InvalidArgument("lookback must be at least 1"));
        }
        let t = normalize_ticker(ticker);
        let value = self.cached(&t, Query::Candles(lookback), || {
            let wire: Vec<WireCandle> = self.fetch(&t, "candles", Some(("days", lookback)))?;
            let mut bars: Vec<Candle> = wire
                .into_iter()
                .map(|w| Candle {
                    timestamp: Utc.from_utc_datetime(&w.date.and_hms_opt(0, 0, 0).expect("midnight exists")),
                    open: w.open,
                    high: w.high,
                    low: w.low,
                    close: w.close,
                    volume: w.volume,
                })
                .collect();
            bars.sort_by_key(|c| c.timestamp);
            if bars.is_empty() {
                return Err(MarketDataError::EmptySeries(t.clone()));
            }
            let series = CandleSeries::new(t.clone(), bars).map_err(|e| MarketDataError::ProviderUnavailable {
                reason: format!("data service returned invalid candles: {e}"),
                hint: None,
            })?;
            Ok(Cached::Candles(series.tail(lookback)))
        })?;
        match value {
            Cached::Candles(s) => Ok(s),
            _ => unreachable!("cache keyed by query kind"),
        }
    }

    fn quote(&self, ticker: &str) -> Result<Quote> {
        let t = normalize_ticker(ticker);
        let value = self.cached(&t, Query::Quote, || {
            let quote: Quote = self.fetch(&t, "quote", None)?;
            if !quote.price.is_finite() || quote.price <= 0.0 {
                return Err(MarketDataError::ProviderUnavailable {
                    reason: format!("data service returned non-positive price for {t}"),
                    hint: None,
                });
            }
            Ok(Cached::Quote(quote))
        })?;
        match value {
            Cached::Quote(q) => Ok(q),
            _ => unreachable!("cache keyed by query kind"),
        }
    }

    fn profile(&self, ticker: &str) -> Result<CompanyProfile> {
        let t = normalize_ticker(ticker);
        let value = self.cached(&t, Query::Profile, || {
            Ok(Cached::Profile(self.fetch(&t, "profile", None)?))
        })?;
        match value {
            Cached::Profile(p) => Ok(p),
            _ => unreachable!("cache keyed by query kind"),
        }
    }

    fn news(&self, ticker: &str, limit: usize) -> Result<Vec<NewsItem>> {
        if limit == 0 {
            return Err(MarketDataError::InvalidArgument("limit must be at least 1"));
        }
        let t = normalize_ticker(ticker);
        let value = self.cached(&t, Query::News(limit), || {
            let mut items: Vec<NewsItem> = self.fetch(&t, "news", Some(("limit", limit)))?;
            sort_news(&mut items);
            items.truncate(limit);
            Ok(Cached::News(items))
        })?;
        match value {
            Cached::News(n) => Ok(n),
            _ => unreachable!("cache keyed by query kind"),
        }
    }

    fn describe(&self) -> String {
        format!("live data service at {}", self.base_url)
    }
}
