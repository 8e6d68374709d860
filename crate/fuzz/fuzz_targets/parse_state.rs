#![no_main]

use libfuzzer_sys::fuzz_target;
use steercert::io::{matrix_to_json, parse_matrix, parse_state};
use steercert::Tolerances;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_matrix(text);
    if let Ok(rho) = parse_state(text, &Tolerances::default()) {
        // Accepted states must survive a roundtrip.
        let again = matrix_to_json(rho.matrix(), rho.dims()).to_string();
        let back = parse_state(&again, &Tolerances::default()).expect("roundtrip");
        assert_eq!(back.dims(), rho.dims());
    }
});
