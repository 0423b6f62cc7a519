//! The six technical indicators shown on the recommendation gauge.
//!
//! The raw functions work on plain slices and return only the defined points,
//! so `output.len() == input.len() - warmup`. [`IndicatorOutput::compute`]
//! runs one indicator over a [`CandleSeries`] and pairs each value with its
//! bar's timestamp.
//!
//! Degenerate denominators are resolved in one place: RSI with no movement
//! at all reads 50, and a stochastic window with no range reads 50.

use std::collections::VecDeque;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_data::CandleSeries;

pub const RSI_PERIOD: usize = 14;
pub const MACD_FAST: usize = 12;
pub const MACD_SLOW: usize = 26;
pub const MACD_SIGNAL: usize = 9;
pub const STO_K: usize = 14;
pub const STO_D: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndicatorId {
    #[serde(rename = "SMA20")]
    Sma20,
    #[serde(rename = "EMA20")]
    Ema20,
    #[serde(rename = "EMA50")]
    Ema50,
    #[serde(rename = "RSI14")]
    Rsi14,
    #[serde(rename = "MACD")]
    Macd,
    #[serde(rename = "STO")]
    Sto,
}

impl IndicatorId {
    pub const ALL: [IndicatorId; 6] = [
        IndicatorId::Sma20,
        IndicatorId::Ema20,
        IndicatorId::Ema50,
        IndicatorId::Rsi14,
        IndicatorId::Macd,
        IndicatorId::Sto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IndicatorId::Sma20 => "SMA20",
            IndicatorId::Ema20 => "EMA20",
            IndicatorId::Ema50 => "EMA50",
            IndicatorId::Rsi14 => "RSI14",
            IndicatorId::Macd => "MACD",
            IndicatorId::Sto => "STO",
        }
    }

    /// Leading bars consumed before the first output point.
    pub fn warmup(self) -> usize {
        match self {
            IndicatorId::Sma20 | IndicatorId::Ema20 => 19,
            IndicatorId::Ema50 => 49,
            IndicatorId::Rsi14 => RSI_PERIOD,
            IndicatorId::Macd => MACD_SLOW + MACD_SIGNAL - 2,
            IndicatorId::Sto => STO_K + STO_D - 2,
        }
    }

    /// Smallest input length accepted.
    pub fn min_bars(self) -> usize {
        match self {
            IndicatorId::Sma20 | IndicatorId::Ema20 => 20,
            IndicatorId::Ema50 => 50,
            IndicatorId::Rsi14 => RSI_PERIOD + 1,
            IndicatorId::Macd => MACD_SLOW + MACD_SIGNAL,
            IndicatorId::Sto => STO_K + STO_D - 1,
        }
    }
}

impl fmt::Display for IndicatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for IndicatorId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IndicatorId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown indicator `{s}`"))
    }
}

/// Failure of a raw computation.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ComputeError {
    #[error("need at least {required} values, got {available}")]
    InsufficientData { required: usize, available: usize },
    #[error("period must be at least 1")]
    ZeroPeriod,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorError {
    #[error("{indicator} needs at least {required} daily bars, got {available}")]
    InsufficientData {
        indicator: IndicatorId,
        required: usize,
        available: usize,
    },
}

fn require(len: usize, required: usize) -> Result<(), ComputeError> {
    if len < required {
        Err(ComputeError::InsufficientData {
            required,
            available: len,
        })
    } else {
        Ok(())
    }
}

fn check_period(period: usize) -> Result<(), ComputeError> {
    if period == 0 {
        Err(ComputeError::ZeroPeriod)
    } else {
        Ok(())
    }
}

/// Mean of a window written as `first + mean(deviation from first)`, which
/// reproduces a constant window exactly.
fn window_mean(window: &[f64]) -> f64 {
    let anchor = window[0];
    anchor + window.iter().map(|x| x - anchor).sum::<f64>() / window.len() as f64
}

pub fn sma(closes: &[f64], period: usize) -> Result<Vec<f64>, ComputeError> {
    check_period(period)?;
    require(closes.len(), period)?;
    Ok(closes.windows(period).map(window_mean).collect())
}

/// EMA seeded with the SMA of the first `period` values, then
/// `ema += alpha * (close - ema)` with `alpha = 2 / (period + 1)`.
pub fn ema(closes: &[f64], period: usize) -> Result<Vec<f64>, ComputeError> {
    check_period(period)?;
    require(closes.len(), period)?;
    let alpha = 2.0 / (period as f64 + 1.0);
    let mut current = window_mean(&closes[..period]);
    let mut out = Vec::with_capacity(closes.len() - period + 1);
    out.push(current);
    for close in &closes[period..] {
        current += alpha * (close - current);
        out.push(current);
    }
    Ok(out)
}

fn rsi_from_averages(avg_gain: f64, avg_loss: f64) -> f64 {
    match (avg_gain > 0.0, avg_loss > 0.0) {
        (false, false) => 50.0,
        (true, false) => 100.0,
        (false, true) => 0.0,
        (true, true) => 100.0 - 100.0 / (1.0 + avg_gain / avg_loss),
    }
}

/// Wilder RSI. The first value sits at index `period`.
pub fn rsi(closes: &[f64], period: usize) -> Result<Vec<f64>, ComputeError> {
    check_period(period)?;
    require(closes.len(), period + 1)?;
    let n = period as f64;
    let (mut gain, mut loss) = (0.0, 0.0);
    for w in closes[..=period].windows(2) {
        let change = w[1] - w[0];
        if change > 0.0 {
            gain += change;
        } else {
            loss -= change;
        }
    }
    gain /= n;
    loss /= n;

    let mut out = Vec::with_capacity(closes.len() - period);
    out.push(rsi_from_averages(gain, loss));
    for w in closes[period..].windows(2) {
        let change = w[1] - w[0];
        let (up, down) = if change > 0.0 { (change, 0.0) } else { (0.0, -change) };
        gain = (gain * (n - 1.0) + up) / n;
        loss = (loss * (n - 1.0) + down) / n;
        out.push(rsi_from_averages(gain, loss));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MacdPoint {
    pub macd_line: f64,
    pub signal_line: f64,
    pub histogram: f64,
}

/// MACD points from the first index where the signal line is defined, i.e.
/// index `slow + signal - 2` of the input.
pub fn macd(closes: &[f64], fast: usize, slow: usize, signal: usize) -> Result<Vec<MacdPoint>, ComputeError> {
    check_period(fast)?;
    check_period(signal)?;
    if slow < fast {
        return Err(ComputeError::InsufficientData {
            required: fast,
            available: slow,
        });
    }
    require(closes.len(), slow + signal)?;
    let fast_ema = ema(closes, fast)?;
    let slow_ema = ema(closes, slow)?;
    let skip = slow - fast;
    let line: Vec<f64> = fast_ema[skip..].iter().zip(&slow_ema).map(|(f, s)| f - s).collect();
    let signal_ema = ema(&line, signal)?;
    Ok(line[signal - 1..]
        .iter()
        .zip(signal_ema)
        .map(|(&macd_line, signal_line)| MacdPoint {
            macd_line,
            signal_line,
            histogram: macd_line - signal_line,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticPoint {
    #[serde(rename = "percentK")]
    pub k: f64,
    #[serde(rename = "percentD")]
    pub d: f64,
}

/// Sliding-window extreme via a monotonic deque of indices.
fn window_extremes(values: &[f64], period: usize, keep: impl Fn(f64, f64) -> bool) -> Vec<f64> {
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut out = Vec::with_capacity(values.len().saturating_sub(period - 1));
    for (i, &v) in values.iter().enumerate() {
        while deque.back().is_some_and(|&j| !keep(values[j], v)) {
            deque.pop_back();
        }
        deque.push_back(i);
        if deque[0] + period <= i {
            deque.pop_front();
        }
        if i + 1 >= period {
            out.push(values[deque[0]]);
        }
    }
    out
}

/// Stochastic oscillator. Points start at index `k_period + d_period - 2`.
pub fn stochastic(
    highs: &[f64],
    lows: &[f64],
    closes: &[f64],
    k_period: usize,
    d_period: usize,
) -> Result<Vec<StochasticPoint>, ComputeError> {
    check_period(k_period)?;
    check_period(d_period)?;
    let len = closes.len().min(highs.len()).min(lows.len());
    require(len, k_period + d_period - 1)?;
    let highest = window_extremes(&highs[..len], k_period, |kept, new| kept > new);
    let lowest = window_extremes(&lows[..len], k_period, |kept, new| kept < new);
    let percent_k: Vec<f64> = highest
        .iter()
        .zip(&lowest)
        .zip(&closes[k_period - 1..len])
        .map(|((&hi, &lo), &close)| {
            if hi == lo {
                50.0
            } else {
                100.0 * (close - lo) / (hi - lo)
            }
        })
        .collect();
    let percent_d = sma(&percent_k, d_period)?;
    Ok(percent_k[d_period - 1..]
        .iter()
        .zip(percent_d)
        .map(|(&k, d)| StochasticPoint { k, d })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndicatorValue {
    Scalar(f64),
    Stochastic(StochasticPoint),
    Macd(MacdPoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorPoint {
    pub timestamp: DateTime<Utc>,
    pub value: IndicatorValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorOutput {
    pub id: IndicatorId,
    pub series: Vec<IndicatorPoint>,
    pub latest: IndicatorValue,
}

impl IndicatorOutput {
    pub fn compute(id: IndicatorId, candles: &CandleSeries) -> Result<Self, IndicatorError> {
        let bars = candles.candles();
        let closes = candles.closes();
        let insufficient = |_| IndicatorError::InsufficientData {
            indicator: id,
            required: id.min_bars(),
            available: bars.len(),
        };
        if bars.len() < id.min_bars() {
            return Err(insufficient(()));
        }
        let values: Vec<IndicatorValue> = match id {
            IndicatorId::Sma20 => sma(&closes, 20).map(scalars),
            IndicatorId::Ema20 => ema(&closes, 20).map(scalars),
            IndicatorId::Ema50 => ema(&closes, 50).map(scalars),
            IndicatorId::Rsi14 => rsi(&closes, RSI_PERIOD).map(scalars),
            IndicatorId::Macd => macd(&closes, MACD_FAST, MACD_SLOW, MACD_SIGNAL)
                .map(|v| v.into_iter().map(IndicatorValue::Macd).collect()),
            IndicatorId::Sto => {
                let highs: Vec<f64> = bars.iter().map(|c| c.high).collect();
                let lows: Vec<f64> = bars.iter().map(|c| c.low).collect();
                stochastic(&highs, &lows, &closes, STO_K, STO_D)
                    .map(|v| v.into_iter().map(IndicatorValue::Stochastic).collect())
            }
        }
        .map_err(|_| insufficient(()))?;

        let warmup = id.warmup();
        debug_assert_eq!(values.len(), bars.len() - warmup);
        let series: Vec<IndicatorPoint> = bars[warmup..]
            .iter()
            .zip(values)
            .map(|(bar, value)| IndicatorPoint {
                timestamp: bar.timestamp,
                value,
            })
            .collect();
        let latest = series.last().expect("min_bars guarantees one point").value;
        Ok(Self { id, series, latest })
    }

    /// The same output restricted to points at or after `from`.
    pub fn since(&self, from: DateTime<Utc>) -> Self {
        Self {
            id: self.id,
            series: self.series.iter().filter(|p| p.timestamp >= from).copied().collect(),
            latest: self.latest,
        }
    }

    pub fn latest_scalar(&self) -> Option<f64> {
        match self.latest {
            IndicatorValue::Scalar(v) => Some(v),
            _ => None,
        }
    }
}

fn scalars(values: Vec<f64>) -> Vec<IndicatorValue> {
    values.into_iter().map(IndicatorValue::Scalar).collect()
}
