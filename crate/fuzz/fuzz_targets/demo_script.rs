#![no_main]

use libfuzzer_sys::fuzz_target;
use stockbabble_cli::parse_script;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    for line in parse_script(&text) {
        assert!(!line.is_empty() && !line.starts_with('#'));
        assert_eq!(line, line.trim());
    }
});
