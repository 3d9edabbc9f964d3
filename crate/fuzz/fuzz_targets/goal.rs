#![no_main]

use cliquefactor::GoalSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(goal) = text.parse::<GoalSpec>() {
        assert_eq!(goal.to_string().parse::<GoalSpec>().unwrap(), goal);
        let _ = goal.validate_for(goal.clique_size().saturating_mul(3));
    }
});
