#![no_main]

use libfuzzer_sys::fuzz_target;
use stockbabble_core::store::StoreData;

fuzz_target!(|data: &[u8]| {
    if let Ok(store) = StoreData::decode(data) {
        let encoded = store.encode();
        let again = StoreData::decode(&encoded).expect("re-encoded store decodes");
        assert_eq!(again.encode(), encoded);
    }
});
