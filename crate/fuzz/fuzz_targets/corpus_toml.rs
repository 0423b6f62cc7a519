#![no_main]

use libfuzzer_sys::fuzz_target;
use stockbabble_core::knowledge::Glossary;
use stockbabble_core::nlu::{CorpusFile, Nlu};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = CorpusFile::parse(text) {
        let _ = Nlu::new(&file, &Glossary::shipped(), &[], None);
    }
});
