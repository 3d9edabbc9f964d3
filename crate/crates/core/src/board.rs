//! Edge-colored state of the unbiased Waiter-Client game on `K_n`.
//!
//! Edges are addressed by a canonical index: the pair `{u, v}` with `u < v`
//! maps to `v(v-1)/2 + u`, which enumerates the pairs of `K_n` as
//! `01, 02, 12, 03, 13, 23, ...`. Storage is sparse: an edge that has never
//! been offered is simply absent, so boards with a few million claimed edges
//! on several hundred thousand vertices stay cheap.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported board.
pub const MAX_VERTICES: u32 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("invalid board size {0}: need 2 to {MAX_VERTICES} vertices")]
    InvalidSize(u64),
    #[error("loop edge at vertex {0}")]
    LoopEdge(u32),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u32, n: u32 },
    #[error("edge index {index} out of range for n = {n}")]
    EdgeIndexOutOfRange { index: u64, n: u32 },
    #[error("offer repeats edge {0}")]
    DuplicateOffer(Edge),
    #[error("illegal offer: edge {0} is already claimed")]
    IllegalOffer(Edge),
    #[error("illegal choice: edge {choice} is not part of offer {offer}")]
    IllegalChoice { offer: Offer, choice: Edge },
}

/// A vertex of `K_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub u32);

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An unordered pair of distinct vertices, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: u32,
    v: u32,
}

impl Edge {
    pub fn new(a: u32, b: u32) -> Result<Self, BoardError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(BoardError::LoopEdge(a)),
        }
    }

    /// Builds an edge from two vertices the caller knows to be distinct.
    #[inline]
    pub(crate) fn of(a: u32, b: u32) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    #[inline]
    pub fn u(self) -> u32 {
        self.u
    }

    #[inline]
    pub fn v(self) -> u32 {
        self.v
    }

    #[inline]
    pub fn endpoints(self) -> (Vertex, Vertex) {
        (Vertex(self.u), Vertex(self.v))
    }

    #[inline]
    pub fn index(self) -> u64 {
        let v = u64::from(self.v);
        v * (v - 1) / 2 + u64::from(self.u)
    }

    pub fn from_index(index: u64) -> Self {
        // v is the largest integer with v(v-1)/2 <= index.
        let mut v = ((1.0 + (1.0 + 8.0 * index as f64).sqrt()) / 2.0).floor() as u64;
        while v * (v - 1) / 2 > index {
            v -= 1;
        }
        while (v + 1) * v / 2 <= index {
            v += 1;
        }
        let u = index - v * (v - 1) / 2;
        Edge {
            u: u as u32,
            v: v as u32,
        }
    }

    #[inline]
    pub fn touches(self, x: u32) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`, if `x` is an endpoint.
    #[inline]
    pub fn other(self, x: u32) -> Option<u32> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn check_in(self, n: u32) -> Result<(), BoardError> {
        if self.v >= n {
            return Err(BoardError::VertexOutOfRange { vertex: self.v, n });
        }
        Ok(())
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// Canonical index of the unordered pair `{u, v}`.
pub fn edge_index(u: Vertex, v: Vertex) -> Result<u64, BoardError> {
    Edge::new(u.0, v.0).map(Edge::index)
}

/// Number of edges of `K_n`.
#[inline]
pub fn edge_count(n: u32) -> u64 {
    let n = u64::from(n);
    n * n.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeColor {
    Unclaimed,
    /// Client's edge.
    Red,
    /// Waiter's edge.
    Blue,
}

/// Two distinct edges offered by Waiter in one round. Order matters only for
/// scripted clients and transcripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Offer {
    first: Edge,
    second: Edge,
}

impl Offer {
    pub fn new(first: Edge, second: Edge) -> Result<Self, BoardError> {
        if first == second {
            return Err(BoardError::DuplicateOffer(first));
        }
        Ok(Offer { first, second })
    }

    #[inline]
    pub fn first(self) -> Edge {
        self.first
    }

    #[inline]
    pub fn second(self) -> Edge {
        self.second
    }

    pub fn contains(self, e: Edge) -> bool {
        self.first == e || self.second == e
    }

    /// The edge that goes to Waiter when Client keeps `choice`.
    pub fn other(self, choice: Edge) -> Option<Edge> {
        if choice == self.first {
            Some(self.second)
        } else if choice == self.second {
            Some(self.first)
        } else {
            None
        }
    }

    pub fn edges(self) -> [Edge; 2] {
        [self.first, self.second]
    }
}

impl fmt::Display for Offer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claim {
    pub color: EdgeColor,
    /// 1-based round in which the edge was claimed.
    pub round: u64,
}

/// The game state. Unclaimed edges are the absent default.
#[derive(Debug, Clone)]
pub struct Board {
    n: u32,
    claims: FxHashMap<u64, Claim>,
    red_adj: Vec<Vec<u32>>,
    blue_adj: Vec<Vec<u32>>,
    round: u64,
    extra_blue: u64,
}

impl Board {
    pub fn new(n: u32) -> Result<Self, BoardError> {
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(BoardError::InvalidSize(u64::from(n)));
        }
        Ok(Board {
            n,
            claims: FxHashMap::default(),
            red_adj: vec![Vec::new(); n as usize],
            blue_adj: vec![Vec::new(); n as usize],
            round: 0,
            extra_blue: 0,
        })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn total_edges(&self) -> u64 {
        edge_count(self.n)
    }

    pub fn unclaimed_count(&self) -> u64 {
        self.total_edges() - self.claims.len() as u64
    }

    /// Largest number of rounds any game on this board can last.
    pub fn capacity(&self) -> u64 {
        self.total_edges() / 2
    }

    pub fn edge(&self, a: u32, b: u32) -> Result<Edge, BoardError> {
        let e = Edge::new(a, b)?;
        e.check_in(self.n)?;
        Ok(e)
    }

    pub fn edge_from_index(&self, index: u64) -> Result<Edge, BoardError> {
        if index >= self.total_edges() {
            return Err(BoardError::EdgeIndexOutOfRange { index, n: self.n });
        }
        Ok(Edge::from_index(index))
    }

    #[inline]
    pub fn claim(&self, e: Edge) -> Option<Claim> {
        self.claims.get(&e.index()).copied()
    }

    #[inline]
    pub fn color(&self, e: Edge) -> EdgeColor {
        self.claim(e).map_or(EdgeColor::Unclaimed, |c| c.color)
    }

    #[inline]
    pub fn is_unclaimed(&self, e: Edge) -> bool {
        !self.claims.contains_key(&e.index())
    }

    #[inline]
    pub fn is_red(&self, a: u32, b: u32) -> bool {
        a != b && self.color(Edge::of(a, b)) == EdgeColor::Red
    }

    /// Red neighbours of `v` in the order the red edges were placed.
    #[inline]
    pub fn red_neighbors(&self, v: u32) -> &[u32] {
        &self.red_adj[v as usize]
    }

    #[inline]
    pub fn blue_neighbors(&self, v: u32) -> &[u32] {
        &self.blue_adj[v as usize]
    }

    #[inline]
    pub fn red_degree(&self, v: u32) -> usize {
        self.red_adj[v as usize].len()
    }

    /// Number of unclaimed edges at `v`.
    pub fn free_degree(&self, v: u32) -> usize {
        let i = v as usize;
        (self.n as usize - 1) - self.red_adj[i].len() - self.blue_adj[i].len()
    }

    pub fn red_count(&self) -> u64 {
        self.red_adj.iter().map(|a| a.len() as u64).sum::<u64>() / 2
    }

    pub fn blue_count(&self) -> u64 {
        self.blue_adj.iter().map(|a| a.len() as u64).sum::<u64>() / 2
    }

    /// At least two unclaimed edges remain, so Waiter can still offer.
    pub fn can_continue(&self) -> bool {
        self.unclaimed_count() >= 2
    }

    /// Checks that `offer` could be played now.
    pub fn check_offer(&self, offer: Offer) -> Result<(), BoardError> {
        for e in offer.edges() {
            e.check_in(self.n)?;
            if !self.is_unclaimed(e) {
                return Err(BoardError::IllegalOffer(e));
            }
        }
        Ok(())
    }

    /// Plays one round: `choice` turns red, the other offered edge blue.
    pub fn apply_round(&mut self, offer: Offer, choice: Edge) -> Result<(), BoardError> {
        self.check_offer(offer)?;
        let blue = offer.other(choice).ok_or(BoardError::IllegalChoice { offer, choice })?;
        self.round += 1;
        let round = self.round;
        self.place(choice, EdgeColor::Red, round);
        self.place(blue, EdgeColor::Blue, round);
        Ok(())
    }

    fn place(&mut self, e: Edge, color: EdgeColor, round: u64) {
        self.claims.insert(e.index(), Claim { color, round });
        let adj = match color {
            EdgeColor::Red => &mut self.red_adj,
            EdgeColor::Blue => &mut self.blue_adj,
            EdgeColor::Unclaimed => unreachable!("unclaimed is never stored"),
        };
        adj[e.u as usize].push(e.v);
        adj[e.v as usize].push(e.u);
    }

    /// End-of-game convention where a lone leftover edge goes to Waiter. The
    /// round counter does not advance, so afterwards blue = round + 1.
    pub fn assign_lone_edge_to_waiter(&mut self) -> Option<Edge> {
        if self.unclaimed_count() != 1 {
            return None;
        }
        let e = self.unclaimed_edges().next()?;
        self.place(e, EdgeColor::Blue, self.round);
        self.extra_blue += 1;
        Some(e)
    }

    /// Unclaimed edges in increasing index order. Quadratic in `n`.
    pub fn unclaimed_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.total_edges())
            .filter(|i| !self.claims.contains_key(i))
            .map(Edge::from_index)
    }

    /// Claimed edges sorted by index.
    pub fn claimed_edges(&self) -> Vec<(Edge, Claim)> {
        let mut out: Vec<_> = self.claims.iter().map(|(&i, &c)| (Edge::from_index(i), c)).collect();
        out.sort_by_key(|(e, _)| e.index());
        out
    }

    /// Red edges sorted by placement round.
    pub fn red_edges_in_order(&self) -> Vec<Edge> {
        let mut out: Vec<_> = self
            .claims
            .iter()
            .filter(|(_, c)| c.color == EdgeColor::Red)
            .map(|(&i, c)| (c.round, Edge::from_index(i)))
            .collect();
        out.sort_unstable();
        out.into_iter().map(|(_, e)| e).collect()
    }

    /// Internal consistency check used by tests and replay verification.
    pub fn check_invariants(&self) -> Result<(), String> {
        let red = self.red_count();
        let blue = self.blue_count();
        if red != self.round || blue != self.round + self.extra_blue {
            return Err(format!("round {} but {red} red and {blue} blue edges", self.round));
        }
        if self.round > self.capacity() {
            return Err(format!("round {} exceeds capacity {}", self.round, self.capacity()));
        }
        let stored = self.claims.len() as u64;
        if stored != red + blue {
            return Err(format!("{stored} stored claims for {red}+{blue} edges"));
        }
        Ok(())
    }
}

impl PartialEq for Board {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.round == other.round
            && self.extra_blue == other.extra_blue
            && self.claims == other.claims
    }
}

impl Eq for Board {}
