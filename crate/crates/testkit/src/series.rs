use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive random-walk closes.
pub fn random_closes(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let mut price = rng.gen_range(5.0..500.0);
    (0..len)
        .map(|_| {
            price *= 1.0 + rng.gen_range(-0.04..0.04);
            price
        })
        .collect()
}

/// Random OHLC bars `(open, high, low, close)` satisfying the candle
/// invariants.
pub fn random_bars(rng: &mut impl Rng, len: usize) -> Vec<(f64, f64, f64, f64)> {
    let closes = random_closes(rng, len);
    let mut prev = closes[0];
    closes
        .into_iter()
        .map(|close| {
            let open = prev * (1.0 + rng.gen_range(-0.01..0.01));
            let high = open.max(close) * (1.0 + rng.gen_range(0.0..0.02));
            let low = open.min(close) * (1.0 - rng.gen_range(0.0..0.02));
            prev = close;
            (open, high, low, close)
        })
        .collect()
}
