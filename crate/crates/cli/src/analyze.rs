use serde::Serialize;
use stockbabble_core::indicators::{IndicatorError, IndicatorId, IndicatorOutput, IndicatorValue};
use stockbabble_core::market_data::{parse_candles_csv, CandleSeries, CsvError};
use stockbabble_core::recommender::{self, fmt_num, RecommendError, Recommendation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("malformed CSV: {0}")]
    Malformed(String),
    #[error("insufficient data: {indicator} needs at least {required} daily bars, got {available}")]
    Insufficient {
        indicator: IndicatorId,
        required: usize,
        available: usize,
    },
    #[error("{0}")]
    Other(String),
}

impl From<CsvError> for AnalyzeError {
    fn from(e: CsvError) -> Self {
        AnalyzeError::Malformed(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub recommendation: Recommendation,
    pub latest: Vec<(IndicatorId, IndicatorValue)>,
}

/// Runs all six indicators and the recommender over a candles CSV.
pub fn analyze_csv(ticker: &str, text: &str) -> Result<Analysis, AnalyzeError> {
    let candles = parse_candles_csv(text)?;
    let series = CandleSeries::new(ticker, candles).map_err(AnalyzeError::Malformed)?;
    let recommendation = recommender::recommend(ticker, &series).map_err(|e| match e {
        RecommendError::Indicator(IndicatorError::InsufficientData {
            indicator,
            required,
            available,
        }) => AnalyzeError::Insufficient {
            indicator,
            required,
            available,
        },
        other => AnalyzeError::Other(other.to_string()),
    })?;
    let latest = IndicatorId::ALL
        .into_iter()
        .map(|id| {
            IndicatorOutput::compute(id, &series)
                .map(|out| (id, out.latest))
                .map_err(|e| AnalyzeError::Other(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    Ok(Analysis { recommendation, latest })
}

pub fn render(analysis: &Analysis) -> String {
    let rec = &analysis.recommendation;
    let mut out = format!("{} as of {}\n", rec.ticker, rec.as_of.format("%Y-%m-%d"));
    for ((id, value), signal) in analysis.latest.iter().zip(&rec.signals) {
        let value = match value {
            IndicatorValue::Scalar(v) => fmt_num(*v),
            IndicatorValue::Stochastic(p) => format!("%K {} %D {}", fmt_num(p.k), fmt_num(p.d)),
            IndicatorValue::Macd(p) => format!(
                "line {} signal {} histogram {}",
                fmt_num(p.macd_line),
                fmt_num(p.signal_line),
                fmt_num(p.histogram)
            ),
        };
        out.push_str(&format!(
            "  {:<6} {:<40} {:<8} {}\n",
            id.name(),
            value,
            signal.signal.to_string(),
            signal.evidence
        ));
    }
    out.push_str(&format!("score {:+}\nlabel {}\n", rec.score, rec.label));
    out
}
