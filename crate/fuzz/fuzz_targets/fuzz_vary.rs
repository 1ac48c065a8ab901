#![no_main]

use libfuzzer_sys::fuzz_target;
use localadaseg::experiment::parse_vary;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(axis) = parse_vary(text) {
        assert!(!axis.key.is_empty());
        assert!(!axis.values.is_empty());
    }
});
