use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, TimeZone, Utc};
use thiserror::Error;

use super::{
    normalize_ticker, sort_news, Candle, CandleSeries, CompanyProfile, MarketData, MarketDataError, NewsItem, Quote,
    Result,
};

const CANDLE_HEADER: [&str; 6] = ["date", "open", "high", "low", "close", "volume"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct CsvError {
    pub line: u64,
    pub message: String,
}

impl CsvError {
    fn new(line: u64, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// Parses a `date,open,high,low,close,volume` file. Rows may come in any
/// order; the result is sorted by date and rejected on duplicate dates or
/// bars that break the candle invariants.
pub fn parse_candles_csv(text: &str) -> std::result::Result<Vec<Candle>, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| CsvError::new(1, e.to_string()))?.clone();
    let header: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if header != CANDLE_HEADER {
        return Err(CsvError::new(
            1,
            format!(
                "expected header `{}`, found `{}`",
                CANDLE_HEADER.join(","),
                header.join(",")
            ),
        ));
    }

    let mut rows: Vec<(u64, Candle)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CsvError::new(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() != CANDLE_HEADER.len() {
            return Err(CsvError::new(
                line,
                format!("expected 6 fields, found {}", record.len()),
            ));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| CsvError::new(line, format!("bad date `{}`: {e}", &record[0])))?;
        let price = |i: usize| -> std::result::Result<f64, CsvError> {
            record[i]
                .parse::<f64>()
                .map_err(|_| CsvError::new(line, format!("bad {} `{}`", CANDLE_HEADER[i], &record[i])))
        };
        let volume = record[5]
            .parse::<u64>()
            .map_err(|_| CsvError::new(line, format!("bad volume `{}`", &record[5])))?;
        let candle = Candle {
            timestamp: Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("midnight exists")),
            open: price(1)?,
            high: price(2)?,
            low: price(3)?,
            close: price(4)?,
            volume,
        };
        candle.validate().map_err(|e| CsvError::new(line, e))?;
        rows.push((line, candle));
    }

    rows.sort_by_key(|(_, c)| c.timestamp);
    if let Some(w) = rows.windows(2).find(|w| w[0].1.timestamp == w[1].1.timestamp) {
        return Err(CsvError::new(
            w[1].0,
            format!("duplicate date {}", w[1].1.timestamp.date_naive()),
        ));
    }
    Ok(rows.into_iter().map(|(_, c)| c).collect())
}

pub fn parse_profiles(text: &str) -> std::result::Result<Vec<CompanyProfile>, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn parse_news(text: &str) -> std::result::Result<Vec<NewsItem>, serde_json::Error> {
    serde_json::from_str(text)
}

/// Market data held entirely in memory, loaded from a fixture directory.
#[derive(Debug, Clone)]
pub struct FixtureProvider {
    root: PathBuf,
    candles: BTreeMap<String, CandleSeries>,
    profiles: BTreeMap<String, CompanyProfile>,
    news: BTreeMap<String, Vec<NewsItem>>,
}

/// Loads `candles/<TICKER>.csv`, `profiles.json` and `news.json` from `dir`.
pub fn load_fixtures(dir: impl AsRef<Path>) -> Result<FixtureProvider> {
    let dir = dir.as_ref();
    let malformed =
        |file: PathBuf, line: Option<u64>, message: String| MarketDataError::MalformedFixture { file, line, message };

    let candle_dir = dir.join("candles");
    let mut candles = BTreeMap::new();
    if candle_dir.is_dir() {
        let entries = fs::read_dir(&candle_dir).map_err(|e| malformed(candle_dir.clone(), None, e.to_string()))?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("csv")))
            .collect();
        paths.sort();
        for path in paths {
            let ticker = path
                .file_stem()
                .and_then(|s| s.to_str())
                .map(normalize_ticker)
                .filter(|t| !t.is_empty())
                .ok_or_else(|| malformed(path.clone(), None, "cannot derive ticker from file name".into()))?;
            let text = fs::read_to_string(&path).map_err(|e| malformed(path.clone(), None, e.to_string()))?;
            let bars = parse_candles_csv(&text).map_err(|e| malformed(path.clone(), Some(e.line), e.message))?;
            let series = CandleSeries::new(ticker.clone(), bars).map_err(|e| malformed(path.clone(), None, e))?;
            candles.insert(ticker, series);
        }
    }
    if candles.is_empty() {
        return Err(malformed(candle_dir, None, "no tickers found".into()));
    }

    let profiles_path = dir.join("profiles.json");
    let text = fs::read_to_string(&profiles_path).map_err(|e| malformed(profiles_path.clone(), None, e.to_string()))?;
    let mut profiles = BTreeMap::new();
    for profile in
        parse_profiles(&text).map_err(|e| malformed(profiles_path.clone(), Some(e.line() as u64), e.to_string()))?
    {
        if profiles.contains_key(&profile.ticker) {
            return Err(malformed(
                profiles_path,
                None,
                format!("duplicate profile for {}", profile.ticker),
            ));
        }
        profiles.insert(profile.ticker.clone(), profile);
    }

    let known: BTreeSet<String> = candles.keys().chain(profiles.keys()).cloned().collect();

    let news_path = dir.join("news.json");
    let text = fs::read_to_string(&news_path).map_err(|e| malformed(news_path.clone(), None, e.to_string()))?;
    let mut news: BTreeMap<String, Vec<NewsItem>> = BTreeMap::new();
    for item in parse_news(&text).map_err(|e| malformed(news_path.clone(), Some(e.line() as u64), e.to_string()))? {
        if !known.contains(&item.ticker) {
            return Err(malformed(
                news_path,
                None,
                format!("news item for unknown ticker {}", item.ticker),
            ));
        }
        news.entry(item.ticker.clone()).or_default().push(item);
    }
    for items in news.values_mut() {
        sort_news(items);
    }

    Ok(FixtureProvider {
        root: dir.to_path_buf(),
        candles,
        profiles,
        news,
    })
}

impl FixtureProvider {
    fn check_known(&self, ticker: &str) -> Result<String> {
        let t = normalize_ticker(ticker);
        if self.candles.contains_key(&t) || self.profiles.contains_key(&t) {
            Ok(t)
        } else {
            Err(MarketDataError::UnknownTicker(t))
        }
    }
}

impl MarketData for FixtureProvider {
    fn candles(&self, ticker: &str, lookback: usize) -> Result<CandleSeries> {
        if lookback == 0 {
            return Err(MarketDataError::InvalidArgument("lookback must be at least 1"));
        }
        let t = self.check_known(ticker)?;
        match self.candles.get(&t) {
            Some(series) if !series.is_empty() => Ok(series.tail(lookback)),
            _ => Err(MarketDataError::EmptySeries(t)),
        }
    }

    fn quote(&self, ticker: &str) -> Result<Quote> {
        let series = self.candles(ticker, 1)?;
        let newest = series.latest().expect("non-empty by construction");
        Ok(Quote {
            ticker: series.ticker.clone(),
            price: newest.close,
            as_of: newest.timestamp,
        })
    }

    fn profile(&self, ticker: &str) -> Result<CompanyProfile> {
        let t = self.check_known(ticker)?;
        self.profiles.get(&t).cloned().ok_or(MarketDataError::UnknownTicker(t))
    }

    fn news(&self, ticker: &str, limit: usize) -> Result<Vec<NewsItem>> {
        if limit == 0 {
            return Err(MarketDataError::InvalidArgument("limit must be at least 1"));
        }
        let t = self.check_known(ticker)?;
        Ok(self
            .news
            .get(&t)
            .map(|items| items.iter().take(limit).cloned().collect())
            .unwrap_or_default())
    }

    fn known_profiles(&self) -> Vec<CompanyProfile> {
        self.profiles.values().cloned().collect()
    }

    fn tickers(&self) -> Option<Vec<String>> {
        let all: BTreeSet<&String> = self.candles.keys().chain(self.profiles.keys()).collect();
        Some(all.into_iter().cloned().collect())
    }

    fn describe(&self) -> String {
        format!("fixtures at {}", self.root.display())
    }
}
