#![no_main]

use libfuzzer_sys::fuzz_target;
use stockbabble_core::market_data::{parse_news, parse_profiles};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_profiles(text);
    if let Ok(items) = parse_news(text) {
        let encoded = serde_json::to_string(&items).unwrap();
        assert_eq!(parse_news(&encoded).unwrap().len(), items.len());
    }
});
