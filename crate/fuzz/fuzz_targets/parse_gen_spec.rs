#![no_main]

use libfuzzer_sys::fuzz_target;
use steercert::io::parse_gen_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_gen_spec(text) {
        // Building may reject parameters but must not panic.
        let _ = spec.build();
    }
});
