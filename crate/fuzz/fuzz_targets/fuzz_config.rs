#![no_main]

use libfuzzer_sys::fuzz_target;
use localadaseg::experiment::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = parse_config(text) {
        // A config that parsed must survive its own TOML echo.
        let again = parse_config(&config.to_toml()).expect("echo reparses");
        assert_eq!(again.to_toml(), config.to_toml());
        let _ = config.topology();
        let _ = config.label();
    }
});
