/// Simple moving average by re-summing every window from scratch.
pub fn sma(closes: &[f64], period: usize) -> Vec<f64> {
    let mut out = Vec::new();
    if period == 0 || closes.len() < period {
        return out;
    }
    for end in period - 1..closes.len() {
        let mut total = 0.0;
        for close in &closes[end + 1 - period..=end] {
            total += close;
        }
        out.push(total / period as f64);
    }
    out
}

/// EMA replayed step by step as `alpha * close + (1 - alpha) * previous`,
/// seeded with the mean of the first `period` closes.
pub fn ema(closes: &[f64], period: usize) -> Vec<f64> {
    let mut out = Vec::new();
    if period == 0 || closes.len() < period {
        return out;
    }
    let alpha = 2.0 / (period as f64 + 1.0);
    let seed: f64 = closes[..period].iter().sum::<f64>() / period as f64;
    out.push(seed);
    for &close in &closes[period..] {
        let prev = *out.last().unwrap();
        out.push(alpha * close + (1.0 - alpha) * prev);
    }
    out
}

/// Wilder RSI, one value per close from index `period` on.
pub fn rsi(closes: &[f64], period: usize) -> Vec<f64> {
    let mut out = Vec::new();
    if period == 0 || closes.len() < period + 1 {
        return out;
    }
    let changes: Vec<f64> = (1..closes.len()).map(|i| closes[i] - closes[i - 1]).collect();
    let ups: Vec<f64> = changes.iter().map(|c| if *c > 0.0 { *c } else { 0.0 }).collect();
    let downs: Vec<f64> = changes.iter().map(|c| if *c < 0.0 { -*c } else { 0.0 }).collect();

    let mut avg_up = ups[..period].iter().sum::<f64>() / period as f64;
    let mut avg_down = downs[..period].iter().sum::<f64>() / period as f64;
    out.push(rsi_value(avg_up, avg_down));
    for j in period..changes.len() {
        avg_up = (avg_up * (period as f64 - 1.0) + ups[j]) / period as f64;
        avg_down = (avg_down * (period as f64 - 1.0) + downs[j]) / period as f64;
        out.push(rsi_value(avg_up, avg_down));
    }
    out
}

fn rsi_value(avg_up: f64, avg_down: f64) -> f64 {
    if avg_up == 0.0 && avg_down == 0.0 {
        50.0
    } else if avg_down == 0.0 {
        100.0
    } else if avg_up == 0.0 {
        0.0
    } else {
        100.0 - 100.0 / (1.0 + avg_up / avg_down)
    }
}

/// MACD triples `(line, signal, histogram)` from the first index where the
/// signal line exists, composed from [`ema`].
pub fn macd(closes: &[f64], fast: usize, slow: usize, signal: usize) -> Vec<(f64, f64, f64)> {
    let fast_ema = ema(closes, fast);
    let slow_ema = ema(closes, slow);
    if slow_ema.is_empty() {
        return Vec::new();
    }
    // fast_ema[k] belongs to close index k + fast - 1; align to slow's start.
    let offset = slow - fast;
    let line: Vec<f64> = slow_ema
        .iter()
        .enumerate()
        .map(|(k, s)| fast_ema[k + offset] - s)
        .collect();
    let sig = ema(&line, signal);
    sig.iter()
        .enumerate()
        .map(|(k, s)| {
            let l = line[k + signal - 1];
            (l, *s, l - *s)
        })
        .collect()
}

/// Stochastic oscillator `(%K, %D)` pairs by scanning each window for its
/// extremes. Bars are `(high, low, close)`.
pub fn stochastic(bars: &[(f64, f64, f64)], k_period: usize, d_period: usize) -> Vec<(f64, f64)> {
    if k_period == 0 || d_period == 0 || bars.len() < k_period + d_period - 1 {
        return Vec::new();
    }
    let mut k_values = Vec::new();
    for end in k_period - 1..bars.len() {
        let mut highest = f64::MIN;
        let mut lowest = f64::MAX;
        for bar in &bars[end + 1 - k_period..=end] {
            if bar.0 > highest {
                highest = bar.0;
            }
            if bar.1 < lowest {
                lowest = bar.1;
            }
        }
        let close = bars[end].2;
        k_values.push(if highest == lowest {
            50.0
        } else {
            100.0 * (close - lowest) / (highest - lowest)
        });
    }
    let d_values = sma(&k_values, d_period);
    d_values
        .iter()
        .enumerate()
        .map(|(i, d)| (k_values[i + d_period - 1], *d))
        .collect()
}

/// Label for a tally score, looked up in a literal 13-entry table.
pub fn label_for_score(score: i32) -> &'static str {
    const TABLE: [&str; 13] = [
        "StrongSell", // -6
        "StrongSell", // -5
        "Sell",       // -4
        "Sell",       // -3
        "WeakSell",   // -2
        "WeakSell",   // -1
        "Hold",       // 0
        "WeakBuy",    // 1
        "WeakBuy",    // 2
        "Buy",        // 3
        "Buy",        // 4
        "StrongBuy",  // 5
        "StrongBuy",  // 6
    ];
    TABLE[(score + 6) as usize]
}

/// Every combination of six three-valued signals, encoded as -1 (sell),
/// 0 (neutral) and 1 (buy), enumerated by counting in base 3.
pub fn all_signal_combinations() -> Vec<[i8; 6]> {
    (0..729u32)
        .map(|mut n| {
            let mut combo = [0i8; 6];
            for slot in combo.iter_mut() {
                *slot = (n % 3) as i8 - 1;
                n /= 3;
            }
            combo
        })
        .collect()
}

/// Non-overlapping dictionary matches chosen from the full list of matching
/// spans: sort every `(start, end)` by start then by descending length and
/// keep each span that does not collide with one already kept.
pub fn greedy_spans(tokens: &[&str], aliases: &[Vec<&str>]) -> Vec<(usize, usize)> {
    let mut all = Vec::new();
    for start in 0..tokens.len() {
        for end in start + 1..=tokens.len() {
            if aliases.iter().any(|a| a.as_slice() == &tokens[start..end]) {
                all.push((start, end));
            }
        }
    }
    all.sort_by(|a, b| a.0.cmp(&b.0).then((b.1 - b.0).cmp(&(a.1 - a.0))));
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for span in all {
        if kept.iter().all(|k| span.0 >= k.1 || span.1 <= k.0) {
            kept.push(span);
        }
    }
    kept.sort();
    kept
}
