#![no_main]

use cliquefactor_service::session::Session;
use cliquefactor_service::SessionConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = SessionConfig::parse(text) else { return };
    let json = serde_json::to_string(&config).unwrap();
    assert_eq!(SessionConfig::parse(&json).unwrap(), config);
    // keep starts cheap; large boards are covered by the unit tests
    if config.n <= 64 {
        let _ = Session::start("fuzz".into(), config, 1, 0);
    }
});
