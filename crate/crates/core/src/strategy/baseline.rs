//! Control Waiters for comparisons.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{StrategyError, Waiter};
use crate::board::{Board, Edge, Offer};

/// Offers a uniformly random pair of unclaimed edges.
#[derive(Debug, Clone)]
pub struct RandomOfferWaiter {
    rng: ChaCha8Rng,
}

impl RandomOfferWaiter {
    pub fn new(seed: u64) -> Self {
        RandomOfferWaiter {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Waiter for RandomOfferWaiter {
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError> {
        if !board.can_continue() {
            return Ok(None);
        }
        let free: Vec<Edge> = board.unclaimed_edges().collect();
        let picked = sample(&mut self.rng, free.len(), 2);
        let (a, b) = (free[picked.index(0)], free[picked.index(1)]);
        Ok(Some(Offer::new(a, b)?))
    }
}

/// Offers two unclaimed edges at a vertex of largest red degree, among
/// vertices with at least two unclaimed edges (ties to the smallest id, then
/// smallest edge indices). Falls back to the two smallest unclaimed edges.
#[derive(Debug, Clone, Default)]
pub struct GreedyDegreeWaiter;

impl GreedyDegreeWaiter {
    pub fn new() -> Self {
        GreedyDegreeWaiter
    }
}

impl Waiter for GreedyDegreeWaiter {
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError> {
        if !board.can_continue() {
            return Ok(None);
        }
        let n = board.n();
        let hub = (0..n)
            .filter(|&v| board.free_degree(v) >= 2)
            .max_by_key(|&v| (board.red_degree(v), std::cmp::Reverse(v)));
        let pair: Vec<Edge> = match hub {
            Some(v) => {
                let mut free: Vec<Edge> = (0..n)
                    .filter(|&w| w != v)
                    .map(|w| Edge::new(v, w).expect("distinct"))
                    .filter(|&e| board.is_unclaimed(e))
                    .collect();
                free.sort_by_key(|e| e.index());
                free.truncate(2);
                free
            }
            None => board.unclaimed_edges().take(2).collect(),
        };
        Ok(Some(Offer::new(pair[0], pair[1])?))
    }
}
