use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Client, StrategyError};
use crate::board::{Board, Edge, Offer};

/// Picks each offered edge with probability 1/2, independently per round.
#[derive(Debug, Clone)]
pub struct RandomClient {
    rng: ChaCha8Rng,
}

impl RandomClient {
    pub fn new(seed: u64) -> Self {
        RandomClient {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn from_rng(rng: ChaCha8Rng) -> Self {
        RandomClient { rng }
    }
}

impl Client for RandomClient {
    fn choose(&mut self, _board: &Board, offer: Offer) -> Result<Edge, StrategyError> {
        Ok(if self.rng.random::<bool>() {
            offer.first()
        } else {
            offer.second()
        })
    }
}

/// Plays a fixed list of first (`true`) / second (`false`) choices.
#[derive(Debug, Clone)]
pub struct ScriptedClient {
    bits: Vec<bool>,
    next: usize,
}

impl ScriptedClient {
    pub fn new(bits: Vec<bool>) -> Self {
        ScriptedClient { bits, next: 0 }
    }

    /// The low `len` bits of `mask`, least significant first.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self::new((0..len).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn used(&self) -> usize {
        self.next
    }
}

impl Client for ScriptedClient {
    fn choose(&mut self, _board: &Board, offer: Offer) -> Result<Edge, StrategyError> {
        let bit = *self.bits.get(self.next).ok_or(StrategyError::ScriptUnderrun {
            round: self.next as u64 + 1,
        })?;
        self.next += 1;
        Ok(if bit { offer.first() } else { offer.second() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn offer() -> Offer {
        Offer::new(Edge::new(0, 1).unwrap(), Edge::new(0, 2).unwrap()).unwrap()
    }

    #[test]
    fn random_client_is_seeded_and_fair() {
        let b = Board::new(3).unwrap();
        let run = |seed| {
            let mut c = RandomClient::new(seed);
            (0..100_000)
                .map(|_| c.choose(&b, offer()).unwrap() == offer().first())
                .collect::<Vec<_>>()
        };
        let a = run(1);
        assert_eq!(a, run(1));
        let firsts = a.iter().filter(|&&x| x).count() as f64 / a.len() as f64;
        assert!((firsts - 0.5).abs() < 0.01, "{firsts}");
        let other = run(2);
        assert!(a[..1000] != other[..1000]);
    }

    #[test]
    fn scripted_client_follows_bits_then_underruns() {
        let b = Board::new(3).unwrap();
        let mut c = ScriptedClient::new(vec![true, false]);
        assert_eq!(c.choose(&b, offer()).unwrap(), offer().first());
        assert_eq!(c.choose(&b, offer()).unwrap(), offer().second());
        assert_eq!(c.choose(&b, offer()), Err(StrategyError::ScriptUnderrun { round: 3 }));
        let mut empty = ScriptedClient::new(vec![]);
        assert!(empty.choose(&b, offer()).is_err());
        let m = ScriptedClient::from_mask(0b10, 2);
        assert_eq!(m.bits, vec![false, true]);
    }
}
