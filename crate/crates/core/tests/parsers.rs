//! Every text entry point on the checked-in fuzz seeds and on arbitrary
//! input: no panics, and whatever parses prints back to itself.

use std::path::PathBuf;

use proptest::prelude::*;

use cliquefactor::detectors::{EncodingVector, Variant};
use cliquefactor::lemma::EdgeOrdering;
use cliquefactor::strategy::StrategyId;
use cliquefactor::{GoalSpec, Transcript};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<String> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| std::fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn transcript(text: &str) -> bool {
    let Ok(t) = Transcript::parse(text) else { return false };
    assert_eq!(Transcript::parse(&t.to_text()).unwrap(), t);
    if t.n <= 4096 {
        if let Ok(board) = t.replay() {
            assert_eq!(board.red_count(), t.moves.len() as u64);
        }
    }
    true
}

fn goal(text: &str) -> bool {
    let Ok(g) = text.parse::<GoalSpec>() else { return false };
    assert_eq!(g.to_string().parse::<GoalSpec>().unwrap(), g);
    let _ = g.validate_for(g.clique_size().saturating_mul(3));
    true
}

fn strategy_id(text: &str) -> bool {
    let Ok(id) = text.parse::<StrategyId>() else {
        return false;
    };
    assert_eq!(id.to_string().parse::<StrategyId>().unwrap(), id);
    true
}

fn ordering(text: &str) -> bool {
    let Ok(o) = EdgeOrdering::parse(text) else { return false };
    assert_eq!(EdgeOrdering::parse(&o.to_text()).unwrap(), o);
    let k = o.k();
    let good: usize = o.good_pairs().iter().sum();
    assert_eq!(good, k * k.saturating_sub(1) * k.saturating_sub(2) / 6);
    true
}

fn encoding_vector(text: &str) -> bool {
    let Ok(y) = text.parse::<EncodingVector>() else {
        return false;
    };
    assert_eq!(y.to_string().parse::<EncodingVector>().unwrap(), y);
    assert_eq!(EncodingVector::from_flat(&y.flat()).unwrap(), y);
    let _ = y.in_z(u64::from(u32::MAX));
    true
}

fn variant(text: &str) -> bool {
    let Ok(v) = text.parse::<Variant>() else { return false };
    assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
    true
}

#[test]
fn fuzz_seeds_behave() {
    type Target = fn(&str) -> bool;
    let targets: [(&str, Target); 6] = [
        ("transcript", transcript),
        ("goal", goal),
        ("strategy_id", strategy_id),
        ("ordering", ordering),
        ("encoding_vector", encoding_vector),
        ("variant", variant),
    ];
    for (name, f) in targets {
        let results: Vec<bool> = seeds(name).iter().map(|s| f(s)).collect();
        assert!(results.iter().any(|&ok| ok), "{name}: no seed parses");
        assert!(results.iter().any(|&ok| !ok), "{name}: no seed is rejected");
    }
}

proptest! {
    #[test]
    fn arbitrary_text_never_panics(s in "\\PC{0,80}") {
        transcript(&s);
        goal(&s);
        strategy_id(&s);
        ordering(&s);
        encoding_vector(&s);
        variant(&s);
    }

    #[test]
    fn near_valid_text_never_panics(
        n in 0u32..12,
        nums in prop::collection::vec(0u64..70, 0..12),
        word in "(clique|factor|random|scripted|s2|s3|clique_builder):?[0-9]{0,3}",
    ) {
        let moves: Vec<String> = nums
            .chunks(3)
            .filter(|c| c.len() == 3)
            .map(|c| format!("{{\"offer\":[{},{}],\"client\":{}}}", c[0], c[1], c[2]))
            .collect();
        let t = format!("{{\"version\":1,\"n\":{n},\"goal\":\"{word}\",\"moves\":[{}]}}", moves.join(","));
        transcript(&t);
        goal(&word);
        strategy_id(&word);
        variant(&word);
        let flat: Vec<String> = nums.iter().map(|x| x.to_string()).collect();
        encoding_vector(&flat.join(","));
        let lines: Vec<String> = nums.chunks(2).map(|c| format!("{} {}", c[0] % 9, c.get(1).map_or(0, |x| x % 9))).collect();
        ordering(&lines.join("\n"));
    }
}
