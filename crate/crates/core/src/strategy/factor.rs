//! Three-stage Waiter strategy for the `K_k`-factor game.
//!
//! * Stage I builds a red anchor clique `R` of size `r` on the first
//!   `s0 = 2^r − 1` vertices.
//! * Stage II builds red `K_k`'s on `2^k − 1` vertices at a time, each one
//!   through a leftover Stage-I vertex while any remain, then from fresh
//!   vertices only. Candidates that miss the clique go back to the pool.
//! * Stage III joins each remaining pool vertex to `k − 1` vertices of the
//!   unused part of `R`, then splits what is left of `R` into `K_k`'s.

use std::collections::BTreeSet;

use serde::Serialize;

use super::clique_builder::{builder_rounds, CliqueBuilder};
use super::{StrategyError, Waiter};
use crate::board::{Board, Edge, Offer};

/// Stage sizes for a given `k`. `s0` and `n_min` are `None` when they do
/// not fit in 64 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StagePlan {
    pub k: u32,
    pub r: u64,
    pub s0: Option<u64>,
    pub n_min: Option<u64>,
}

impl StagePlan {
    /// Additive constant in the round bound `2^k·n/k + c_impl`.
    pub fn c_impl(&self) -> Option<u64> {
        let anchor = 1u64.checked_shl(u32::try_from(self.r).ok()?)?;
        anchor.checked_add((1u64 << self.k) * u64::from(self.k))
    }

    /// Exact number of rounds the strategy plays on `K_n`; it does not
    /// depend on Client.
    pub fn total_rounds(&self, n: u64) -> Option<u64> {
        let k = u64::from(self.k);
        let s0 = self.s0?;
        let b = s0 - self.r;
        let pool = (n.checked_sub(s0)?).checked_sub((k - 1) * b)?;
        let width = 1u64 << k;
        let pure = if pool >= width { (pool - width) / k + 1 } else { 0 };
        let t = pool - pure * k;
        let stage1 = builder_rounds(u32::try_from(self.r).ok()?);
        Some(stage1 + (b + pure) * builder_rounds(self.k) + t * (k - 1))
    }
}

/// Smallest anchor size that lets Stage III finish: each of the fewer than
/// `2^k` leftovers uses `k − 1` anchor vertices and needs `2(k − 1)` unused
/// ones to draw from.
fn min_anchor(k: u32) -> Option<u64> {
    let w = 1u64.checked_shl(k)?;
    (u64::from(k) - 1).checked_mul(w - 1)?.checked_add(u64::from(k))
}

pub fn stage_parameters(k: u32) -> Result<StagePlan, StrategyError> {
    if !(2..=32).contains(&k) {
        return Err(StrategyError::BadParameter(format!("factor size {k} outside 2..=32")));
    }
    let r = min_anchor(k).expect("k <= 32");
    let s0 = u32::try_from(r)
        .ok()
        .and_then(|r| 1u64.checked_shl(r))
        .filter(|&p| p != 0 && r < 64)
        .map(|p| p - 1);
    let n_min = s0.and_then(|s0| {
        let k64 = u64::from(k);
        let fresh = (k64 - 1).checked_mul(s0 - r)?.checked_add((1u64 << k) - 1 - k64)?;
        let n = s0.checked_add(fresh)?;
        n.checked_add((k64 - n % k64) % k64)
    });
    Ok(StagePlan { k, r, s0, n_min })
}

/// Whether an anchor of size `r` works for some board with `log2 n`
/// vertices: Stage III must not run out, and `n >= k·2^r` covers Stage II.
pub fn plan_is_valid(k: u32, r: f64, log2_n: f64) -> bool {
    let Some(need) = min_anchor(k) else {
        return false;
    };
    r >= need as f64 && log2_n >= r + f64::from(k).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    I,
    II,
    III,
    Done,
}

#[derive(Debug, Clone)]
pub struct FactorWaiter {
    k: u32,
    n: u32,
    plan: StagePlan,
    stage: Stage,
    builder: Option<CliqueBuilder>,
    anchor: Vec<u32>,
    leftover_b: Vec<u32>,
    next_b: usize,
    pool: BTreeSet<u32>,
    blocks: Vec<Vec<u32>>,
    stage2_cliques: u64,
    // Stage III
    unused_anchor: Vec<u32>,
    leftovers: Vec<u32>,
    next_z: usize,
    z_reds: Vec<u32>,
    z_cursor: usize,
    outstanding: Option<Offer>,
}

impl FactorWaiter {
    pub fn new(k: u32, n: u32) -> Result<Self, StrategyError> {
        let plan = stage_parameters(k)?;
        if !n.is_multiple_of(k) {
            return Err(StrategyError::Indivisible { n, k });
        }
        let need = plan.n_min.unwrap_or(u64::MAX);
        if u64::from(n) < need {
            return Err(StrategyError::BoardTooSmall { n: u64::from(n), need });
        }
        let r = u32::try_from(plan.r).expect("fits since n >= n_min");
        let s0 = plan.s0.expect("fits since n >= n_min") as u32;
        Ok(FactorWaiter {
            k,
            n,
            plan,
            stage: Stage::I,
            builder: Some(CliqueBuilder::new(r, (0..s0).collect())?),
            anchor: Vec::new(),
            leftover_b: Vec::new(),
            next_b: 0,
            pool: BTreeSet::new(),
            blocks: Vec::new(),
            stage2_cliques: 0,
            unused_anchor: Vec::new(),
            leftovers: Vec::new(),
            next_z: 0,
            z_reds: Vec::new(),
            z_cursor: 0,
            outstanding: None,
        })
    }

    pub fn plan(&self) -> StagePlan {
        self.plan
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    /// The anchor clique, sorted; empty until Stage I ends.
    pub fn anchor(&self) -> &[u32] {
        &self.anchor
    }

    /// Finished `K_k`'s so far (the set F).
    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn stage2_cliques(&self) -> u64 {
        self.stage2_cliques
    }

    /// Vertices left for Stage III.
    pub fn leftovers(&self) -> &[u32] {
        &self.leftovers
    }

    fn start_stage2_clique(&mut self) -> Result<bool, StrategyError> {
        let width = (1usize << self.k) - 1;
        let cands: Vec<u32> = if self.next_b < self.leftover_b.len() {
            if self.pool.len() < width - 1 {
                return Err(StrategyError::BoardTooSmall {
                    n: u64::from(self.n),
                    need: self.plan.n_min.unwrap_or(u64::MAX),
                });
            }
            let b = self.leftover_b[self.next_b];
            self.next_b += 1;
            std::iter::once(b)
                .chain((0..width - 1).map(|_| self.pool.pop_first().expect("checked size")))
                .collect()
        } else if self.pool.len() > width {
            (0..width)
                .map(|_| self.pool.pop_first().expect("checked size"))
                .collect()
        } else {
            return Ok(false);
        };
        self.builder = Some(CliqueBuilder::new(self.k, cands)?);
        Ok(true)
    }

    fn finish_stage2_clique(&mut self) {
        let builder = self.builder.take().expect("active builder");
        let clique = builder.clique().to_vec();
        for &c in builder.candidates() {
            if !clique.contains(&c) {
                self.pool.insert(c);
            }
        }
        let mut block = clique;
        block.sort_unstable();
        self.blocks.push(block);
        self.stage2_cliques += 1;
    }

    fn enter_stage3(&mut self) {
        self.stage = Stage::III;
        self.leftovers = std::mem::take(&mut self.pool).into_iter().collect();
        self.unused_anchor = self.anchor.clone();
    }

    fn finish(&mut self) {
        for chunk in self.unused_anchor.chunks(self.k as usize) {
            self.blocks.push(chunk.to_vec());
        }
        self.unused_anchor.clear();
        self.stage = Stage::Done;
    }

    /// Checks that every finished block is a red clique and that outside
    /// finished blocks and the anchor no edge has both endpoints. Linear in
    /// the number of claimed edges.
    pub fn check_invariants(&self, board: &Board) -> Result<(), String> {
        let mut finished = vec![false; self.n as usize];
        for b in &self.blocks {
            if b.len() != self.k as usize {
                return Err(format!("block {b:?} has the wrong size"));
            }
            for (i, &x) in b.iter().enumerate() {
                if std::mem::replace(&mut finished[x as usize], true) {
                    return Err(format!("vertex {x} in two blocks"));
                }
                if b[i + 1..].iter().any(|&y| !board.is_red(x, y)) {
                    return Err(format!("block {b:?} is not a red clique"));
                }
            }
        }
        if matches!(self.stage, Stage::II) {
            let mut in_anchor = vec![false; self.n as usize];
            for &a in &self.anchor {
                in_anchor[a as usize] = true;
            }
            let active: Vec<u32> = self.builder.as_ref().map(|b| b.clique().to_vec()).unwrap_or_default();
            let free = |x: u32| !finished[x as usize] && !in_anchor[x as usize] && !active.contains(&x);
            for (e, _) in board.claimed_edges() {
                if free(e.u()) && free(e.v()) {
                    return Err(format!("edge {e} joins two unfinished vertices"));
                }
            }
        }
        Ok(())
    }
}

impl Waiter for FactorWaiter {
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError> {
        loop {
            match self.stage {
                Stage::I => {
                    let builder = self.builder.as_mut().expect("stage I builder");
                    if !builder.is_done() {
                        return builder.next_offer(board);
                    }
                    let builder = self.builder.take().expect("stage I builder");
                    let mut anchor = builder.clique().to_vec();
                    anchor.sort_unstable();
                    let mut in_anchor = vec![false; builder.candidates().len()];
                    for &a in &anchor {
                        in_anchor[a as usize] = true;
                    }
                    self.leftover_b = (0..builder.candidates().len() as u32)
                        .filter(|&v| !in_anchor[v as usize])
                        .collect();
                    self.anchor = anchor;
                    self.pool = (builder.candidates().len() as u32..self.n).collect();
                    self.stage = Stage::II;
                    if !self.start_stage2_clique()? {
                        self.enter_stage3();
                    }
                }
                Stage::II => {
                    let builder = self.builder.as_mut().expect("stage II builder");
                    if !builder.is_done() {
                        return builder.next_offer(board);
                    }
                    self.finish_stage2_clique();
                    if !self.start_stage2_clique()? {
                        self.enter_stage3();
                    }
                }
                Stage::III => {
                    if self.next_z == self.leftovers.len() {
                        self.finish();
                        continue;
                    }
                    let z = self.leftovers[self.next_z];
                    if self.z_reds.len() + 1 == self.k as usize {
                        let mut block = vec![z];
                        block.extend_from_slice(&self.z_reds);
                        block.sort_unstable();
                        self.unused_anchor.retain(|a| !self.z_reds.contains(a));
                        self.blocks.push(block);
                        self.z_reds.clear();
                        self.z_cursor = 0;
                        self.next_z += 1;
                        continue;
                    }
                    if let Some(o) = self.outstanding {
                        return Ok(Some(o));
                    }
                    if self.z_cursor + 1 >= self.unused_anchor.len() {
                        return Err(StrategyError::BadParameter(
                            "anchor clique exhausted in stage III".into(),
                        ));
                    }
                    let a = self.unused_anchor[self.z_cursor];
                    let b = self.unused_anchor[self.z_cursor + 1];
                    let offer = Offer::new(Edge::new(z, a)?, Edge::new(z, b)?)?;
                    self.outstanding = Some(offer);
                    return Ok(Some(offer));
                }
                Stage::Done => return Ok(None),
            }
        }
    }

    fn observe(&mut self, offer: Offer, choice: Edge) {
        match self.stage {
            Stage::I | Stage::II => {
                if let Some(b) = self.builder.as_mut() {
                    b.observe(offer, choice);
                }
            }
            Stage::III => {
                if self.outstanding == Some(offer) {
                    self.outstanding = None;
                    let z = self.leftovers[self.next_z];
                    self.z_reds.push(choice.other(z).expect("offer touches z"));
                    self.z_cursor += 2;
                }
            }
            Stage::Done => {}
        }
    }
}
