#![no_main]

use cliquefactor::strategy::StrategyId;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(id) = text.parse::<StrategyId>() {
        assert_eq!(id.to_string().parse::<StrategyId>().unwrap(), id);
    }
});
