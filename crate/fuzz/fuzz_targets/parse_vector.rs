#![no_main]

use libfuzzer_sys::fuzz_target;
use steercert::io::{parse_vector, vector_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_vector(text) {
        let back = parse_vector(&vector_to_json(&v).to_string()).expect("roundtrip");
        assert_eq!(back.len(), v.len());
    }
});
