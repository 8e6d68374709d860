#![no_main]

use libfuzzer_sys::fuzz_target;
use steercert::io::parse_settings;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(settings) = parse_settings(text) {
        let _ = settings.kets();
    }
});
