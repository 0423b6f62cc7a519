//! Turns the six indicators into Buy/Sell/Neutral signals and tallies them.
//!
//! Each indicator votes once. Neutral votes count as zero, so the score is
//! `#buy - #sell` in `-6..=6` and maps onto a seven-step label.

use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::{IndicatorError, IndicatorId, IndicatorOutput, IndicatorValue};
use crate::market_data::CandleSeries;

pub const RSI_OVERSOLD: f64 = 30.0;
pub const RSI_OVERBOUGHT: f64 = 70.0;
pub const STO_OVERSOLD: f64 = 20.0;
pub const STO_OVERBOUGHT: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Signal {
    Buy,
    Sell,
    Neutral,
}

impl Signal {
    pub fn vote(self) -> i32 {
        match self {
            Signal::Buy => 1,
            Signal::Sell => -1,
            Signal::Neutral => 0,
        }
    }

    pub fn flipped(self) -> Signal {
        match self {
            Signal::Buy => Signal::Sell,
            Signal::Sell => Signal::Buy,
            Signal::Neutral => Signal::Neutral,
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signal::Buy => "Buy",
            Signal::Sell => "Sell",
            Signal::Neutral => "Neutral",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Label {
    StrongSell,
    Sell,
    WeakSell,
    Hold,
    WeakBuy,
    Buy,
    StrongBuy,
}

impl Label {
    pub const ALL: [Label; 7] = [
        Label::StrongSell,
        Label::Sell,
        Label::WeakSell,
        Label::Hold,
        Label::WeakBuy,
        Label::Buy,
        Label::StrongBuy,
    ];

    pub fn from_score(score: i32) -> Label {
        match score {
            i32::MIN..=-5 => Label::StrongSell,
            -4..=-3 => Label::Sell,
            -2..=-1 => Label::WeakSell,
            0 => Label::Hold,
            1..=2 => Label::WeakBuy,
            3..=4 => Label::Buy,
            5..=i32::MAX => Label::StrongBuy,
        }
    }

    pub fn mirrored(self) -> Label {
        match self {
            Label::StrongSell => Label::StrongBuy,
            Label::Sell => Label::Buy,
            Label::WeakSell => Label::WeakBuy,
            Label::Hold => Label::Hold,
            Label::WeakBuy => Label::WeakSell,
            Label::Buy => Label::Sell,
            Label::StrongBuy => Label::StrongSell,
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Label::StrongSell => "Strong Sell",
            Label::Sell => "Sell",
            Label::WeakSell => "Weak Sell",
            Label::Hold => "Hold",
            Label::WeakBuy => "Weak Buy",
            Label::Buy => "Buy",
            Label::StrongBuy => "Strong Buy",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSignal {
    pub id: IndicatorId,
    pub signal: Signal,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Recommendation {
    pub ticker: String,
    pub as_of: DateTime<Utc>,
    pub signals: Vec<IndicatorSignal>,
    pub score: i32,
    pub label: Label,
}

impl Recommendation {
    /// Assembles a recommendation, deriving score and label from `signals`.
    pub fn from_signals(ticker: impl Into<String>, as_of: DateTime<Utc>, signals: Vec<IndicatorSignal>) -> Self {
        let score = signals.iter().map(|s| s.signal.vote()).sum();
        Self {
            ticker: ticker.into(),
            as_of,
            signals,
            score,
            label: Label::from_score(score),
        }
    }

    pub fn count(&self, signal: Signal) -> usize {
        self.signals.iter().filter(|s| s.signal == signal).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecommendError {
    #[error("indicator output is for {found}, expected {expected}")]
    MismatchedIndicator { expected: IndicatorId, found: IndicatorId },
    #[error("unexpected value shape for {0}")]
    MalformedOutput(IndicatorId),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
}

/// Compact number formatting for evidence strings: two decimals, trailing
/// zeros dropped.
pub fn fmt_num(value: f64) -> String {
    let s = format!("{value:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn signal_for(
    id: IndicatorId,
    output: &IndicatorOutput,
    latest_close: f64,
) -> Result<IndicatorSignal, RecommendError> {
    if output.id != id {
        return Err(RecommendError::MismatchedIndicator {
            expected: id,
            found: output.id,
        });
    }
    let (signal, evidence) = match (id, output.latest) {
        (IndicatorId::Sma20 | IndicatorId::Ema20 | IndicatorId::Ema50, IndicatorValue::Scalar(avg)) => {
            if latest_close >= avg {
                (
                    Signal::Buy,
                    format!("close {} ≥ {id} {}", fmt_num(latest_close), fmt_num(avg)),
                )
            } else {
                (
                    Signal::Sell,
                    format!("close {} < {id} {}", fmt_num(latest_close), fmt_num(avg)),
                )
            }
        }
        (IndicatorId::Rsi14, IndicatorValue::Scalar(rsi)) => band_signal("RSI14", rsi, RSI_OVERSOLD, RSI_OVERBOUGHT),
        (IndicatorId::Sto, IndicatorValue::Stochastic(p)) => band_signal("%K", p.k, STO_OVERSOLD, STO_OVERBOUGHT),
        (IndicatorId::Macd, IndicatorValue::Macd(p)) => {
            let (line, sig) = (fmt_num(p.macd_line), fmt_num(p.signal_line));
            if p.macd_line > p.signal_line {
                (Signal::Buy, format!("MACD line {line} > signal {sig}"))
            } else if p.macd_line < p.signal_line {
                (Signal::Sell, format!("MACD line {line} < signal {sig}"))
            } else {
                (Signal::Neutral, format!("MACD line {line} = signal {sig}"))
            }
        }
        _ => return Err(RecommendError::MalformedOutput(id)),
    };
    Ok(IndicatorSignal { id, signal, evidence })
}

fn band_signal(name: &str, value: f64, low: f64, high: f64) -> (Signal, String) {
    let (v, lo, hi) = (fmt_num(value), fmt_num(low), fmt_num(high));
    if value <= low {
        (Signal::Buy, format!("{name} {v} ≤ {lo}"))
    } else if value >= high {
        (Signal::Sell, format!("{name} {v} ≥ {hi}"))
    } else {
        (Signal::Neutral, format!("{name} {v} between {lo} and {hi}"))
    }
}

/// Bars needed before every indicator can produce a value.
pub fn min_bars() -> usize {
    IndicatorId::ALL.iter().map(|id| id.min_bars()).max().unwrap_or(0)
}

/// Computes all six indicators and tallies their signals.
///
/// When the series is too short, the error names the indicator with the
/// largest unmet requirement.
pub fn recommend(ticker: &str, series: &CandleSeries) -> Result<Recommendation, RecommendError> {
    if let Some(limiting) = IndicatorId::ALL
        .into_iter()
        .filter(|id| series.len() < id.min_bars())
        .max_by_key(|id| id.min_bars())
    {
        return Err(IndicatorError::InsufficientData {
            indicator: limiting,
            required: limiting.min_bars(),
            available: series.len(),
        }
        .into());
    }
    let latest = series.latest().expect("length checked above");
    let signals = IndicatorId::ALL
        .into_iter()
        .map(|id| {
            let output = IndicatorOutput::compute(id, series)?;
            signal_for(id, &output, latest.close)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Recommendation::from_signals(ticker, latest.timestamp, signals))
}

/// One line per indicator followed by a tally summary, e.g.
/// `Tally: 4 buy − 2 sell = +2 → Weak Buy`.
pub fn explain(rec: &Recommendation) -> Vec<String> {
    let mut lines: Vec<String> = rec
        .signals
        .iter()
        .map(|s| {
            let mut line = format!("{}: {} → {}", s.id, s.evidence, s.signal);
            if s.signal == Signal::Neutral {
                line.push_str(" (not counted)");
            }
            line
        })
        .collect();
    let (buys, sells, neutrals) = (
        rec.count(Signal::Buy),
        rec.count(Signal::Sell),
        rec.count(Signal::Neutral),
    );
    let score = if rec.score > 0 {
        format!("+{}", rec.score)
    } else {
        rec.score.to_string()
    };
    let mut summary = format!("Tally: {buys} buy − {sells} sell = {score} → {}", rec.label);
    if neutrals > 0 {
        summary.push_str(&format!(" ({neutrals} neutral not counted)"));
    }
    lines.push(summary);
    lines
}
