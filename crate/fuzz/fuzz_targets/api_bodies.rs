#![no_main]

use libfuzzer_sys::fuzz_target;
use stockbabble_service::wire::{decode_credentials, decode_message};

fuzz_target!(|data: &[u8]| {
    if let Ok(creds) = decode_credentials(data) {
        assert_eq!(creds.username, creds.username.trim());
    }
    if let Ok(message) = decode_message(data) {
        assert!(!message.text.trim().is_empty());
    }
});
