//! Building a red `K_l` on `2^l − 1` fresh vertices.
//!
//! Starting from `w_1` = the first candidate, Waiter offers the edges from
//! `w_j` to the rest of the current set in consecutive pairs. The red
//! endpoints form the next set, whose first vertex (in candidate order) is
//! `w_{j+1}`. Each set halves, so the build takes `2^l − l − 1` rounds and
//! every edge it places touches some `w_j`.

use super::{StrategyError, Waiter};
use crate::board::{Board, Edge, Offer};

/// Rounds the builder takes for a `K_l`.
pub fn builder_rounds(l: u32) -> u64 {
    (1u64 << l) - u64::from(l) - 1
}

#[derive(Debug, Clone)]
pub struct CliqueBuilder {
    l: u32,
    candidates: Vec<u32>,
    clique: Vec<u32>,
    /// Vertices of the current set still to be offered against the pivot.
    pending: Vec<u32>,
    cursor: usize,
    /// Red endpoints collected this sweep, in candidate order.
    next_set: Vec<u32>,
    outstanding: Option<Offer>,
    checked: bool,
}

impl CliqueBuilder {
    /// `candidates` must hold exactly `2^l − 1` distinct vertices; their order
    /// decides the pivots.
    pub fn new(l: u32, candidates: Vec<u32>) -> Result<Self, StrategyError> {
        let expected = super::builder_candidates(l)? as usize;
        if candidates.len() != expected {
            return Err(StrategyError::BadBudget {
                expected,
                got: candidates.len(),
            });
        }
        let mut distinct = candidates.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != expected {
            return Err(StrategyError::BadBudget {
                expected,
                got: distinct.len(),
            });
        }
        let mut b = CliqueBuilder {
            l,
            clique: vec![candidates[0]],
            pending: candidates[1..].to_vec(),
            candidates,
            cursor: 0,
            next_set: Vec::new(),
            outstanding: None,
            checked: false,
        };
        b.finish_sweep_if_needed();
        Ok(b)
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn candidates(&self) -> &[u32] {
        &self.candidates
    }

    pub fn is_done(&self) -> bool {
        self.clique.len() == self.l as usize
    }

    /// `w_1, …, w_j` so far; the whole clique once done.
    pub fn clique(&self) -> &[u32] {
        &self.clique
    }

    fn pivot(&self) -> u32 {
        *self.clique.last().expect("clique starts with w_1")
    }

    fn finish_sweep_if_needed(&mut self) {
        while !self.is_done() && self.cursor == self.pending.len() {
            let set = std::mem::take(&mut self.next_set);
            debug_assert!(!set.is_empty() || self.pending.is_empty());
            self.clique.push(set[0]);
            self.pending = set[1..].to_vec();
            self.cursor = 0;
            assert!(self.pending.len().is_multiple_of(2), "odd sweep in clique builder");
        }
    }

    /// Rejects boards where an edge inside the candidate set is claimed.
    pub fn check_clean(&self, board: &Board) -> Result<(), StrategyError> {
        if let Some(&top) = self.candidates.iter().max() {
            if top >= board.n() {
                return Err(StrategyError::BoardTooSmall {
                    n: u64::from(board.n()),
                    need: u64::from(top) + 1,
                });
            }
        }
        if board.round() == 0 && board.blue_count() == 0 {
            return Ok(());
        }
        for (i, &a) in self.candidates.iter().enumerate() {
            for &b in &self.candidates[i + 1..] {
                let e = Edge::new(a, b)?;
                if !board.is_unclaimed(e) {
                    return Err(StrategyError::DirtyBoard(e));
                }
            }
        }
        Ok(())
    }
}

impl Waiter for CliqueBuilder {
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError> {
        if !self.checked {
            self.check_clean(board)?;
            self.checked = true;
        }
        if self.is_done() {
            return Ok(None);
        }
        if let Some(o) = self.outstanding {
            return Ok(Some(o));
        }
        let w = self.pivot();
        let (x, y) = (self.pending[self.cursor], self.pending[self.cursor + 1]);
        let offer = Offer::new(Edge::new(w, x)?, Edge::new(w, y)?)?;
        self.outstanding = Some(offer);
        Ok(Some(offer))
    }

    fn observe(&mut self, offer: Offer, choice: Edge) {
        if self.outstanding != Some(offer) {
            return;
        }
        self.outstanding = None;
        let w = self.pivot();
        let red = choice.other(w).expect("offered edges touch the pivot");
        self.next_set.push(red);
        self.cursor += 2;
        self.finish_sweep_if_needed();
    }
}
