#![no_main]

use libfuzzer_sys::fuzz_target;
use localadaseg::experiment::Sidecar;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sidecar) = Sidecar::from_json(text) {
        let _ = sidecar.config();
    }
});
