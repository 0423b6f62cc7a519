#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use stockbabble_core::knowledge::Glossary;
use stockbabble_core::nlu::Nlu;

fn nlu() -> &'static Nlu {
    static NLU: OnceLock<Nlu> = OnceLock::new();
    NLU.get_or_init(|| Nlu::with_default_corpus(&Glossary::shipped(), &[], None).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(m) = nlu().understand(&text) {
        assert!((0.0..=1.0).contains(&m.confidence));
        let _ = nlu().suggestions(m.intent, &m.entities);
    }
});
