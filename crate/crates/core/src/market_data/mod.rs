//! Prices, quotes, company profiles and news behind one provider interface.
//!
//! [`FixtureProvider`] answers everything from files loaded once at startup
//! and is the default. [`LiveProvider`] talks to an HTTP data service and
//! upholds the same contracts: windowed ascending candles, newest-first news
//! with a headline tie-break, and the same error kinds.

mod fixture;
mod live;

use std::fmt;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fixture::{load_fixtures, parse_candles_csv, parse_news, parse_profiles, CsvError, FixtureProvider};
pub use live::{LiveProvider, CACHE_TTL, DATA_KEY_ENV, DATA_URL_ENV};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketDataError {
    #[error("unknown ticker {0}")]
    UnknownTicker(String),
    #[error("market data provider unavailable: {reason}")]
    ProviderUnavailable { reason: String, hint: Option<String> },
    #[error("no price data for {0} in the requested window")]
    EmptySeries(String),
    #[error("malformed fixture {}{}: {message}", file.display(), line.map(|l| format!(" line {l}")).unwrap_or_default())]
    MalformedFixture {
        file: PathBuf,
        line: Option<u64>,
        message: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T, E = MarketDataError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candle {
    pub timestamp: DateTime<Utc>,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: u64,
}

impl Candle {
    /// Checks the OHLC ordering and that every price is finite and positive.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let prices = [self.open, self.high, self.low, self.close];
        if prices.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err("prices must be finite and positive".into());
        }
        if self.low > self.open.min(self.close) {
            return Err(format!("low {} above min(open, close)", self.low));
        }
        if self.high < self.open.max(self.close) {
            return Err(format!("high {} below max(open, close)", self.high));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Interval {
    Daily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandleSeries {
    pub ticker: String,
    pub interval: Interval,
    candles: Vec<Candle>,
}

impl CandleSeries {
    /// Builds a daily series, rejecting bars that break the candle invariants
    /// or timestamps that are not strictly increasing.
    pub fn new(ticker: impl Into<String>, candles: Vec<Candle>) -> std::result::Result<Self, String> {
        for (i, candle) in candles.iter().enumerate() {
            candle.validate().map_err(|e| format!("bar {i}: {e}"))?;
        }
        if let Some(i) = candles.windows(2).position(|w| w[0].timestamp >= w[1].timestamp) {
            return Err(format!("timestamps not strictly increasing at bar {}", i + 1));
        }
        Ok(Self {
            ticker: ticker.into(),
            interval: Interval::Daily,
            candles,
        })
    }

    pub fn candles(&self) -> &[Candle] {
        &self.candles
    }

    pub fn len(&self) -> usize {
        self.candles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candles.is_empty()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.candles.iter().map(|c| c.close).collect()
    }

    pub fn latest(&self) -> Option<&Candle> {
        self.candles.last()
    }

    /// The newest `n` bars.
    pub fn tail(&self, n: usize) -> CandleSeries {
        let start = self.candles.len().saturating_sub(n);
        CandleSeries {
            ticker: self.ticker.clone(),
            interval: self.interval,
            candles: self.candles[start..].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Quote {
    pub ticker: String,
    pub price: f64,
    pub as_of: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawProfile")]
pub struct CompanyProfile {
    pub ticker: String,
    pub name: String,
    pub ceo: String,
    pub headquarters: String,
    pub sector: String,
    pub description: String,
    /// Zero when the source omitted the field; see `dividend_reported`.
    pub annual_dividend: f64,
    pub dividend_reported: bool,
    pub market_cap: f64,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawProfile {
    ticker: String,
    name: String,
    #[serde(default)]
    ceo: String,
    #[serde(default)]
    headquarters: String,
    #[serde(default)]
    sector: String,
    #[serde(default)]
    description: String,
    annual_dividend: Option<f64>,
    #[serde(default = "default_true")]
    dividend_reported: bool,
    #[serde(default)]
    market_cap: f64,
}

fn default_true() -> bool {
    true
}

impl TryFrom<RawProfile> for CompanyProfile {
    type Error = String;

    fn try_from(raw: RawProfile) -> std::result::Result<Self, String> {
        if raw.ticker.trim().is_empty() || raw.name.trim().is_empty() {
            return Err("profile ticker and name must be non-empty".into());
        }
        let (annual_dividend, dividend_reported) = match raw.annual_dividend {
            Some(d) if !d.is_finite() || d < 0.0 => {
                return Err(format!("{}: annualDividend must be non-negative", raw.ticker))
            }
            Some(d) => (d, raw.dividend_reported),
            None => (0.0, false),
        };
        Ok(CompanyProfile {
            ticker: raw.ticker.trim().to_ascii_uppercase(),
            name: raw.name,
            ceo: raw.ceo,
            headquarters: raw.headquarters,
            sector: raw.sector,
            description: raw.description,
            annual_dividend,
            dividend_reported,
            market_cap: raw.market_cap,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawNewsItem")]
pub struct NewsItem {
    pub ticker: String,
    pub headline: String,
    pub source: String,
    pub url: String,
    pub published_at: DateTime<Utc>,
    pub summary: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawNewsItem {
    ticker: String,
    headline: String,
    #[serde(default)]
    source: String,
    #[serde(default)]
    url: String,
    published_at: DateTime<Utc>,
    #[serde(default)]
    summary: String,
}

impl TryFrom<RawNewsItem> for NewsItem {
    type Error = String;

    fn try_from(raw: RawNewsItem) -> std::result::Result<Self, String> {
        if raw.headline.trim().is_empty() {
            return Err("news headline must be non-empty".into());
        }
        Ok(NewsItem {
            ticker: raw.ticker.trim().to_ascii_uppercase(),
            headline: raw.headline,
            source: raw.source,
            url: raw.url,
            published_at: raw.published_at,
            summary: raw.summary,
        })
    }
}

/// Newest first; equal timestamps fall back to headline order.
pub(crate) fn sort_news(items: &mut [NewsItem]) {
    items.sort_by(|a, b| {
        b.published_at
            .cmp(&a.published_at)
            .then_with(|| a.headline.cmp(&b.headline))
    });
}

/// A source of market data. Implementations are read-only from the caller's
/// point of view and may be shared between request handlers.
pub trait MarketData: Send + Sync {
    /// At most `lookback` of the most recent daily bars, oldest first.
    fn candles(&self, ticker: &str, lookback: usize) -> Result<CandleSeries>;

    fn quote(&self, ticker: &str) -> Result<Quote>;

    fn profile(&self, ticker: &str) -> Result<CompanyProfile>;

    /// At most `limit` items, newest first.
    fn news(&self, ticker: &str, limit: usize) -> Result<Vec<NewsItem>>;

    /// Profiles of every company this provider can enumerate. Providers that
    /// cannot list their universe return an empty list.
    fn known_profiles(&self) -> Vec<CompanyProfile> {
        Vec::new()
    }

    /// Tickers this provider can enumerate, or `None` when the universe is
    /// open-ended.
    fn tickers(&self) -> Option<Vec<String>> {
        None
    }

    fn describe(&self) -> String;
}

impl fmt::Debug for dyn MarketData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub(crate) fn normalize_ticker(ticker: &str) -> String {
    ticker.trim().to_ascii_uppercase()
}
