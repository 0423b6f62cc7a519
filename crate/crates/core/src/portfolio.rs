//! Simulated per-user portfolios with average-cost accounting.
//!
//! Purchases merge into one position per ticker priced at the provider's
//! latest quote; sales reduce the cost basis in proportion to the shares
//! sold. There is no cash balance.

use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use rust_decimal::prelude::{FromPrimitive, ToPrimitive};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::Clock;
use crate::market_data::{MarketData, MarketDataError};
use crate::store::{Store, StoreError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Position {
    pub ticker: String,
    pub shares: u64,
    /// Total amount paid for the shares still held.
    #[serde(with = "rust_decimal::serde::str")]
    pub cost_basis: Decimal,
    pub opened_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Portfolio {
    pub user_id: String,
    pub positions: BTreeMap<String, Position>,
    pub updated_at: DateTime<Utc>,
}

impl Portfolio {
    pub fn empty(user_id: &str, now: DateTime<Utc>) -> Self {
        Self {
            user_id: user_id.to_string(),
            positions: BTreeMap::new(),
            updated_at: now,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        for (ticker, p) in &self.positions {
            if ticker != &p.ticker {
                return Err(format!("position key {ticker} does not match {}", p.ticker));
            }
            if p.shares == 0 || p.cost_basis <= Decimal::ZERO {
                return Err(format!("position {ticker} must hold shares at positive cost"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PositionValue {
    pub ticker: String,
    pub shares: u64,
    #[serde(with = "rust_decimal::serde::float")]
    pub cost_basis: Decimal,
    #[serde(with = "rust_decimal::serde::float")]
    pub market_value: Decimal,
    #[serde(with = "rust_decimal::serde::float")]
    pub pnl_abs: Decimal,
    #[serde(with = "rust_decimal::serde::float")]
    pub pnl_pct: Decimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Valuation {
    pub as_of: DateTime<Utc>,
    pub per_position: Vec<PositionValue>,
    #[serde(with = "rust_decimal::serde::float")]
    pub total_cost: Decimal,
    #[serde(with = "rust_decimal::serde::float")]
    pub total_value: Decimal,
    #[serde(with = "rust_decimal::serde::float")]
    pub total_pnl_abs: Decimal,
    #[serde(with = "rust_decimal::serde::float")]
    pub total_pnl_pct: Decimal,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PortfolioError {
    #[error("unknown ticker {0}")]
    UnknownTicker(String),
    #[error("unknown user {0}")]
    UnknownUser(String),
    #[error("no position in {0}")]
    UnknownPosition(String),
    #[error("invalid quantity: {0}")]
    InvalidQuantity(String),
    #[error(transparent)]
    MarketData(MarketDataError),
    #[error(transparent)]
    Store(StoreError),
}

impl From<MarketDataError> for PortfolioError {
    fn from(e: MarketDataError) -> Self {
        match e {
            MarketDataError::UnknownTicker(t) => PortfolioError::UnknownTicker(t),
            other => PortfolioError::MarketData(other),
        }
    }
}

impl From<StoreError> for PortfolioError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownUser(u) => PortfolioError::UnknownUser(u),
            other => PortfolioError::Store(other),
        }
    }
}

/// Converts a quote to a decimal through its shortest decimal rendering, so
/// `123.45_f64` becomes exactly `123.45`.
pub fn price_to_decimal(price: f64) -> Option<Decimal> {
    Decimal::from_str_exact(&price.to_string())
        .ok()
        .or_else(|| Decimal::from_f64(price))
}

pub fn to_f64(value: Decimal) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Portfolio operations over a store, priced by a market-data provider.
#[derive(Clone)]
pub struct PortfolioBook {
    store: Arc<Store>,
    market: Arc<dyn MarketData>,
    clock: Arc<dyn Clock>,
}

impl PortfolioBook {
    pub fn new(store: Arc<Store>, market: Arc<dyn MarketData>, clock: Arc<dyn Clock>) -> Self {
        Self { store, market, clock }
    }

    fn current_price(&self, ticker: &str) -> Result<(String, Decimal), PortfolioError> {
        let quote = self.market.quote(ticker)?;
        let price = price_to_decimal(quote.price)
            .filter(|p| *p > Decimal::ZERO)
            .ok_or_else(|| {
                PortfolioError::MarketData(MarketDataError::ProviderUnavailable {
                    reason: format!("unusable quote {} for {}", quote.price, quote.ticker),
                    hint: None,
                })
            })?;
        Ok((quote.ticker, price))
    }

    pub fn portfolio(&self, user_id: &str) -> Result<Portfolio, PortfolioError> {
        Ok(self.store.portfolio(user_id)?)
    }

    /// Buys `shares` at the current quote and merges them into any existing
    /// position.
    pub fn add_position(&self, user_id: &str, ticker: &str, shares: u64) -> Result<Portfolio, PortfolioError> {
        if shares == 0 {
            return Err(PortfolioError::InvalidQuantity("share count must be positive".into()));
        }
        self.store.portfolio(user_id)?;
        let (ticker, price) = self.current_price(ticker)?;
        let now = self.clock.now();
        self.store.update_portfolio(user_id, |portfolio| {
            let cost = price * Decimal::from(shares);
            let position = portfolio.positions.entry(ticker.clone()).or_insert_with(|| Position {
                ticker: ticker.clone(),
                shares: 0,
                cost_basis: Decimal::ZERO,
                opened_at: now,
            });
            position.shares = position
                .shares
                .checked_add(shares)
                .ok_or_else(|| PortfolioError::InvalidQuantity("share count overflow".into()))?;
            position.cost_basis += cost;
            portfolio.updated_at = now;
            Ok(portfolio.clone())
        })
    }

    /// Sells `shares` of an existing position, reducing the cost basis
    /// proportionally. Selling everything closes the position.
    pub fn remove_position(&self, user_id: &str, ticker: &str, shares: u64) -> Result<Portfolio, PortfolioError> {
        if shares == 0 {
            return Err(PortfolioError::InvalidQuantity("share count must be positive".into()));
        }
        let ticker = ticker.trim().to_ascii_uppercase();
        let now = self.clock.now();
        self.store.update_portfolio(user_id, |portfolio| {
            let position = portfolio
                .positions
                .get_mut(&ticker)
                .ok_or_else(|| PortfolioError::UnknownPosition(ticker.clone()))?;
            if shares > position.shares {
                return Err(PortfolioError::InvalidQuantity(format!(
                    "cannot remove {shares} shares of {ticker}, only {} held",
                    position.shares
                )));
            }
            let remaining = position.shares - shares;
            if remaining == 0 {
                portfolio.positions.remove(&ticker);
            } else {
                position.cost_basis = position.cost_basis * Decimal::from(remaining) / Decimal::from(position.shares);
                position.shares = remaining;
            }
            portfolio.updated_at = now;
            Ok(portfolio.clone())
        })
    }

    /// Marks every position to the provider's current quote.
    pub fn value_portfolio(&self, user_id: &str) -> Result<Valuation, PortfolioError> {
        let portfolio = self.store.portfolio(user_id)?;
        let mut per_position = Vec::with_capacity(portfolio.positions.len());
        for position in portfolio.positions.values() {
            let (_, price) = self.current_price(&position.ticker)?;
            let market_value = price * Decimal::from(position.shares);
            let pnl_abs = market_value - position.cost_basis;
            per_position.push(PositionValue {
                ticker: position.ticker.clone(),
                shares: position.shares,
                cost_basis: position.cost_basis,
                market_value,
                pnl_abs,
                pnl_pct: pnl_abs / position.cost_basis,
            });
        }
        let total_cost: Decimal = per_position.iter().map(|p| p.cost_basis).sum();
        let total_value: Decimal = per_position.iter().map(|p| p.market_value).sum();
        let total_pnl_abs: Decimal = per_position.iter().map(|p| p.pnl_abs).sum();
        let total_pnl_pct = if total_cost.is_zero() {
            Decimal::ZERO
        } else {
            total_pnl_abs / total_cost
        };
        Ok(Valuation {
            as_of: self.clock.now(),
            per_position,
            total_cost,
            total_value,
            total_pnl_abs,
            total_pnl_pct,
        })
    }
}
