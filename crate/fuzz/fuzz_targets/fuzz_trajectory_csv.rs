#![no_main]

use libfuzzer_sys::fuzz_target;
use localadaseg::experiment::{parse_trajectory_csv, write_trajectory_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_trajectory_csv(text) {
        let mut out = Vec::new();
        write_trajectory_csv(&mut out, &rows).expect("write to memory");
        let again = parse_trajectory_csv(std::str::from_utf8(&out).unwrap()).expect("reparse");
        assert_eq!(again.len(), rows.len());
    }
});
