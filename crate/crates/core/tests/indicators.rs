use proptest::prelude::*;
use stockbabble_core::indicators::{self, MACD_FAST, MACD_SIGNAL, MACD_SLOW, RSI_PERIOD, STO_D, STO_K};
use stockbabble_testkit::{oracle, series};

fn assert_close(label: &str, actual: &[f64], expected: &[f64]) {
    assert_eq!(actual.len(), expected.len(), "{label}: length");
    for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
        assert!((a - e).abs() <= 1e-9, "{label}[{i}]: {a} vs {e}");
    }
}

#[test]
fn thousand_random_series_match_oracles() {
    let mut rng = series::rng(2021);
    for case in 0..1000 {
        let len = 35 + (case * 7919) % 266;
        let bars = series::random_bars(&mut rng, len);
        let closes: Vec<f64> = bars.iter().map(|b| b.3).collect();
        let highs: Vec<f64> = bars.iter().map(|b| b.1).collect();
        let lows: Vec<f64> = bars.iter().map(|b| b.2).collect();

        for period in [20, 50] {
            if len >= period {
                assert_close(
                    "sma",
                    &indicators::sma(&closes, period).unwrap(),
                    &oracle::sma(&closes, period),
                );
                assert_close(
                    "ema",
                    &indicators::ema(&closes, period).unwrap(),
                    &oracle::ema(&closes, period),
                );
            }
        }
        assert_close(
            "rsi",
            &indicators::rsi(&closes, RSI_PERIOD).unwrap(),
            &oracle::rsi(&closes, RSI_PERIOD),
        );

        let macd = indicators::macd(&closes, MACD_FAST, MACD_SLOW, MACD_SIGNAL).unwrap();
        let expected = oracle::macd(&closes, MACD_FAST, MACD_SLOW, MACD_SIGNAL);
        assert_eq!(macd.len(), expected.len());
        for (p, e) in macd.iter().zip(&expected) {
            assert_close("macd", &[p.macd_line, p.signal_line, p.histogram], &[e.0, e.1, e.2]);
        }

        let sto = indicators::stochastic(&highs, &lows, &closes, STO_K, STO_D).unwrap();
        let hlc: Vec<(f64, f64, f64)> = bars.iter().map(|b| (b.1, b.2, b.3)).collect();
        let expected = oracle::stochastic(&hlc, STO_K, STO_D);
        assert_eq!(sto.len(), expected.len());
        for (p, e) in sto.iter().zip(&expected) {
            assert_close("sto", &[p.k, p.d], &[e.0, e.1]);
        }
    }
}

fn walk() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    (35usize..200, any::<u64>()).prop_map(|(len, seed)| {
        let mut rng = series::rng(seed);
        series::random_bars(&mut rng, len)
            .into_iter()
            .map(|b| (b.1, b.2, b.3))
            .collect()
    })
}

fn split(bars: &[(f64, f64, f64)]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    (
        bars.iter().map(|b| b.0).collect(),
        bars.iter().map(|b| b.1).collect(),
        bars.iter().map(|b| b.2).collect(),
    )
}

fn close_rel(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn oscillators_stay_in_range(bars in walk()) {
        let (h, l, c) = split(&bars);
        for v in indicators::rsi(&c, RSI_PERIOD).unwrap() {
            prop_assert!((0.0..=100.0).contains(&v));
        }
        for p in indicators::stochastic(&h, &l, &c, STO_K, STO_D).unwrap() {
            prop_assert!((0.0..=100.0).contains(&p.k) && (0.0..=100.0).contains(&p.d));
        }
    }

    #[test]
    fn constant_series_fixed_points(c in 0.01f64..10_000.0, len in 35usize..300) {
        let closes = vec![c; len];
        for v in indicators::sma(&closes, 20).unwrap() { prop_assert_eq!(v, c); }
        for v in indicators::ema(&closes, 20).unwrap() { prop_assert_eq!(v, c); }
        for v in indicators::rsi(&closes, RSI_PERIOD).unwrap() { prop_assert_eq!(v, 50.0); }
        for p in indicators::macd(&closes, MACD_FAST, MACD_SLOW, MACD_SIGNAL).unwrap() {
            prop_assert_eq!((p.macd_line, p.signal_line, p.histogram), (0.0, 0.0, 0.0));
        }
        for p in indicators::stochastic(&closes, &closes, &closes, STO_K, STO_D).unwrap() {
            prop_assert_eq!((p.k, p.d), (50.0, 50.0));
        }
    }

    #[test]
    fn averages_are_shift_and_scale_equivariant(bars in walk(), shift in -100.0f64..100.0, scale in 0.1f64..10.0) {
        let (_, _, c) = split(&bars);
        let shifted: Vec<f64> = c.iter().map(|x| x + shift).collect();
        let scaled: Vec<f64> = c.iter().map(|x| x * scale).collect();
        let base_sma = indicators::sma(&c, 20).unwrap();
        let base_ema = indicators::ema(&c, 20).unwrap();
        for (b, s) in base_sma.iter().zip(indicators::sma(&shifted, 20).unwrap()) {
            prop_assert!(close_rel(b + shift, s, s.abs()));
        }
        for (b, s) in base_ema.iter().zip(indicators::ema(&scaled, 20).unwrap()) {
            prop_assert!(close_rel(b * scale, s, s.abs()));
        }
    }

    #[test]
    fn oscillators_ignore_shift_and_positive_scale(bars in walk(), shift in 0.0f64..100.0, scale in 0.1f64..10.0) {
        let (h, l, c) = split(&bars);
        let tf = |xs: &[f64]| -> Vec<f64> { xs.iter().map(|x| x * scale + shift).collect() };
        let (h2, l2, c2) = (tf(&h), tf(&l), tf(&c));
        for (a, b) in indicators::rsi(&c, RSI_PERIOD).unwrap().iter().zip(indicators::rsi(&c2, RSI_PERIOD).unwrap()) {
            prop_assert!((a - b).abs() <= 1e-6, "rsi {} vs {}", a, b);
        }
        let sto_a = indicators::stochastic(&h, &l, &c, STO_K, STO_D).unwrap();
        let sto_b = indicators::stochastic(&h2, &l2, &c2, STO_K, STO_D).unwrap();
        for (a, b) in sto_a.iter().zip(&sto_b) {
            prop_assert!((a.k - b.k).abs() <= 1e-6 && (a.d - b.d).abs() <= 1e-6);
        }
        let shifted: Vec<f64> = c.iter().map(|x| x + shift).collect();
        let peak = c.iter().cloned().fold(0.0, f64::max) + shift;
        let m_a = indicators::macd(&c, MACD_FAST, MACD_SLOW, MACD_SIGNAL).unwrap();
        let m_b = indicators::macd(&shifted, MACD_FAST, MACD_SLOW, MACD_SIGNAL).unwrap();
        for (a, b) in m_a.iter().zip(&m_b) {
            prop_assert!(close_rel(a.macd_line, b.macd_line, peak * 1e3));
            prop_assert!(close_rel(a.signal_line, b.signal_line, peak * 1e3));
        }
    }
}
