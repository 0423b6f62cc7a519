#![no_main]

use libfuzzer_sys::fuzz_target;
use stockbabble_core::knowledge::Glossary;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(glossary) = Glossary::parse(text) {
        for entry in glossary.entries() {
            assert!(glossary.lookup_term(&entry.key).is_ok());
            let _ = glossary.related_terms(&entry.key);
        }
    }
});
