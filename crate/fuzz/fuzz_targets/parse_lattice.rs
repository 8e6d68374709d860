#![no_main]

use libfuzzer_sys::fuzz_target;
use steercert::io::{parse_lattice, point_to_map, FAMILY_NAMES};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(lattice) = parse_lattice(text) else { return };
    if lattice.len() > 4096 {
        return;
    }
    let points = lattice.points();
    assert_eq!(points.len(), lattice.len());
    for p in points.iter().take(16) {
        for family in FAMILY_NAMES {
            let _ = point_to_map(family, p);
        }
    }
});
