//! Plain-text rendering of chat responses for terminals.

use std::fmt::Write;

use stockbabble_core::dialogue::{ChatResponse, ComponentPayload, UiComponent};
use stockbabble_core::indicators::{IndicatorId, IndicatorValue};
use stockbabble_core::portfolio::to_f64;
use stockbabble_core::recommender::fmt_num;

const BARS: [char; 8] = ['▁', '▂', '▃', '▄', '▅', '▆', '▇', '█'];
pub const SPARKLINE_WIDTH: usize = 40;

/// Unicode sparkline of `values`, averaged into at most `width` buckets.
pub fn sparkline(values: &[f64], width: usize) -> String {
    if values.is_empty() || width == 0 {
        return String::new();
    }
    let buckets = width.min(values.len());
    let points: Vec<f64> = (0..buckets)
        .map(|b| {
            let start = b * values.len() / buckets;
            let end = ((b + 1) * values.len() / buckets).max(start + 1);
            values[start..end].iter().sum::<f64>() / (end - start) as f64
        })
        .collect();
    let lo = points.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    points
        .iter()
        .map(|p| {
            if hi == lo {
                BARS[3]
            } else {
                BARS[(((p - lo) / (hi - lo)) * 7.0).round() as usize]
            }
        })
        .collect()
}

fn value_text(value: &IndicatorValue) -> String {
    match value {
        IndicatorValue::Scalar(v) => fmt_num(*v),
        IndicatorValue::Stochastic(p) => format!("%K {} %D {}", fmt_num(p.k), fmt_num(p.d)),
        IndicatorValue::Macd(p) => format!("{} / signal {}", fmt_num(p.macd_line), fmt_num(p.signal_line)),
    }
}

pub fn component(c: &UiComponent) -> String {
    let mut out = String::new();
    match &c.payload {
        ComponentPayload::Chart {
            ticker,
            name,
            candles,
            overlays,
            default_visible_overlays,
            ..
        } => {
            let closes: Vec<f64> = candles.iter().map(|c| c.close).collect();
            let (first, last) = (candles.first(), candles.last());
            let _ = writeln!(
                out,
                "[chart] {name} ({ticker}) {} to {}",
                first
                    .map(|c| c.timestamp.format("%Y-%m-%d").to_string())
                    .unwrap_or_default(),
                last.map(|c| c.timestamp.format("%Y-%m-%d").to_string())
                    .unwrap_or_default(),
            );
            let _ = writeln!(
                out,
                "  {}  last {}",
                sparkline(&closes, SPARKLINE_WIDTH),
                last.map(|c| fmt_num(c.close)).unwrap_or_default()
            );
            let latest: Vec<String> = IndicatorId::ALL
                .iter()
                .filter_map(|id| {
                    let overlay = overlays.iter().find(|o| o.id == *id)?;
                    let point = overlay.points.last()?;
                    let marker = if default_visible_overlays.contains(id) { "*" } else { "" };
                    Some(format!("{id}{marker} {}", value_text(&point.value)))
                })
                .collect();
            let _ = writeln!(out, "  {}", latest.join(" | "));
        }
        ComponentPayload::NewsTimeline { ticker, items } => {
            let _ = writeln!(out, "[news] {ticker}");
            for item in items {
                let _ = writeln!(
                    out,
                    "  {}  {} ({})",
                    item.published_at.format("%Y-%m-%d %H:%M"),
                    item.headline,
                    item.source
                );
            }
        }
        ComponentPayload::ProfileCard { profile } => {
            let _ = writeln!(out, "[profile] {} ({})", profile.name, profile.ticker);
            let _ = writeln!(out, "  CEO: {}", profile.ceo);
            let _ = writeln!(out, "  Headquarters: {}", profile.headquarters);
            let _ = writeln!(out, "  Sector: {}", profile.sector);
            let dividend = if profile.dividend_reported {
                fmt_num(profile.annual_dividend)
            } else {
                "not reported".into()
            };
            let _ = writeln!(out, "  Annual dividend: {dividend}");
            let _ = writeln!(out, "  Market cap: {}", fmt_num(profile.market_cap));
            let _ = writeln!(out, "  {}", profile.description);
        }
        ComponentPayload::RecommendationGauge {
            recommendation,
            explanation_lines,
        } => {
            let _ = writeln!(
                out,
                "[recommendation] {}: {} (score {:+})",
                recommendation.ticker, recommendation.label, recommendation.score
            );
            for line in explanation_lines {
                let _ = writeln!(out, "  {line}");
            }
        }
        ComponentPayload::PortfolioTable { valuation } => {
            let _ = writeln!(out, "[portfolio]");
            let _ = writeln!(
                out,
                "  {:<6} {:>8} {:>12} {:>12} {:>12} {:>8}",
                "TICKER", "SHARES", "COST", "VALUE", "P&L", "P&L %"
            );
            for p in &valuation.per_position {
                let _ = writeln!(
                    out,
                    "  {:<6} {:>8} {:>12.2} {:>12.2} {:>12.2} {:>7.2}%",
                    p.ticker,
                    p.shares,
                    to_f64(p.cost_basis),
                    to_f64(p.market_value),
                    to_f64(p.pnl_abs),
                    to_f64(p.pnl_pct) * 100.0
                );
            }
            let _ = writeln!(
                out,
                "  {:<6} {:>8} {:>12.2} {:>12.2} {:>12.2} {:>7.2}%",
                "TOTAL",
                "",
                to_f64(valuation.total_cost),
                to_f64(valuation.total_value),
                to_f64(valuation.total_pnl_abs),
                to_f64(valuation.total_pnl_pct) * 100.0
            );
        }
        ComponentPayload::TermCard { entry, related } => {
            let _ = writeln!(out, "[term] {}", entry.title);
            let _ = writeln!(out, "  {}", entry.definition);
            if !related.is_empty() {
                let titles: Vec<&str> = related.iter().map(|r| r.title.as_str()).collect();
                let _ = writeln!(out, "  Related: {}", titles.join(", "));
            }
        }
        ComponentPayload::Text { title, lines } => {
            let _ = writeln!(out, "[{title}]");
            for line in lines {
                let _ = writeln!(out, "  - {line}");
            }
        }
    }
    out
}

/// Messages, component blocks and numbered suggestions.
pub fn response(r: &ChatResponse) -> String {
    let mut out = String::new();
    for m in &r.messages {
        let _ = writeln!(out, "bot> {m}");
    }
    for c in &r.components {
        out.push_str(&component(c));
    }
    if !r.suggestions.is_empty() {
        let _ = writeln!(out, "Try:");
        for (i, s) in r.suggestions.iter().enumerate() {
            let _ = writeln!(out, "  {}) {s}", i + 1);
        }
    }
    out
}
