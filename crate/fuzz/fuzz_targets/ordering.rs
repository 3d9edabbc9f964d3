#![no_main]

use cliquefactor::lemma::EdgeOrdering;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(o) = EdgeOrdering::parse(text) {
        assert_eq!(EdgeOrdering::parse(&o.to_text()).unwrap(), o);
        let k = o.k();
        let good: usize = o.good_pairs().iter().sum();
        assert_eq!(good, k * k.saturating_sub(1) * k.saturating_sub(2) / 6);
        let _ = o.component_pairs();
    }
});
