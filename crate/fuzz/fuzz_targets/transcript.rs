#![no_main]

use cliquefactor::Transcript;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = Transcript::parse(text) else { return };
    let again = Transcript::parse(&t.to_text()).expect("own output parses");
    assert_eq!(again, t);
    if t.n <= 4096 {
        if let Ok(board) = t.replay() {
            assert_eq!(board.red_count(), t.moves.len() as u64);
        }
    }
});
