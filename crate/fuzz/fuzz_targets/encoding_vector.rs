#![no_main]

use cliquefactor::detectors::EncodingVector;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(y) = text.parse::<EncodingVector>() {
        assert_eq!(y.to_string().parse::<EncodingVector>().unwrap(), y);
        assert_eq!(EncodingVector::from_flat(&y.flat()).unwrap(), y);
        let _ = y.in_z(u64::from(u32::MAX));
        let _ = y.has_decreasing_repeat();
    }
});
