#![no_main]

use libfuzzer_sys::fuzz_target;
use stockbabble_core::market_data::{parse_candles_csv, CandleSeries};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(bars) = parse_candles_csv(text) {
        for bar in &bars {
            assert!(bar.validate().is_ok());
        }
        let _ = CandleSeries::new("FUZZ", bars);
    }
});
