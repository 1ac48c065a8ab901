#![no_main]

use libfuzzer_sys::fuzz_target;
use localadaseg::problems::BilinearProblem;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = BilinearProblem::from_json(text) {
        let again = BilinearProblem::from_json(&p.to_json()).expect("round trip");
        assert_eq!(again.to_json(), p.to_json());
    }
});
