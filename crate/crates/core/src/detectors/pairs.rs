//! Order statistics of the edges inside one clique.
//!
//! Both statistics look at a complete graph on `k` local vertices whose edges
//! arrive one at a time:
//!
//! * a *good pair* `(v, ab)` has `ab` as the last edge of triangle `vab`;
//! * a *component pair* `(v, ab)` has `a` and `b` both already in `v`'s
//!   component when `ab` arrives.

use super::DetectError;
use crate::board::{Board, Edge, Vertex};
use crate::graph::UnionFind;

/// Arrival times of the edges of a clique on local vertices `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueTimes {
    k: usize,
    times: Vec<u64>,
}

impl CliqueTimes {
    /// Reads every pair's time from `time_of(i, j)` (`i < j`); all must be
    /// present and distinct.
    pub fn from_fn(k: usize, mut time_of: impl FnMut(usize, usize) -> Option<u64>) -> Result<Self, DetectError> {
        let mut times = vec![0; k * k];
        let mut seen = Vec::with_capacity(k * (k.saturating_sub(1)) / 2);
        for j in 0..k {
            for i in 0..j {
                let t = time_of(i, j).ok_or(DetectError::BadOrdering(format!("edge {i}-{j} has no timestamp")))?;
                times[i * k + j] = t;
                times[j * k + i] = t;
                seen.push(t);
            }
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(DetectError::BadOrdering(format!("two edges share timestamp {}", w[0])));
        }
        Ok(CliqueTimes { k, times })
    }

    /// Edge `order[t]` arrives at time `t`.
    pub fn from_order(k: usize, order: &[(usize, usize)]) -> Result<Self, DetectError> {
        let mut lookup = vec![None; k * k];
        for (t, &(a, b)) in order.iter().enumerate() {
            if a >= k || b >= k || a == b {
                return Err(DetectError::BadOrdering(format!("bad edge {a}-{b}")));
            }
            if lookup[a * k + b].is_some() {
                return Err(DetectError::BadOrdering(format!("edge {a}-{b} repeated")));
            }
            lookup[a * k + b] = Some(t as u64);
            lookup[b * k + a] = Some(t as u64);
        }
        Self::from_fn(k, |i, j| lookup[i * k + j])
    }

    /// Red placement rounds of the clique's edges on `board`; local vertex
    /// `i` is `clique[i]`.
    pub fn from_board(board: &Board, clique: &[Vertex]) -> Result<Self, DetectError> {
        Self::from_fn(clique.len(), |i, j| {
            let e = Edge::new(clique[i].0, clique[j].0).ok()?;
            e.check_in(board.n()).ok()?;
            board
                .claim(e)
                .filter(|c| c.color == crate::board::EdgeColor::Red)
                .map(|c| c.round)
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn time(&self, i: usize, j: usize) -> u64 {
        self.times[i * self.k + j]
    }

    /// Local edges sorted by arrival.
    pub fn edges_in_order(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(u64, usize, usize)> = (0..self.k)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .map(|(i, j)| (self.time(i, j), i, j))
            .collect();
        edges.sort_unstable();
        edges.into_iter().map(|(_, i, j)| (i, j)).collect()
    }
}

/// Good pairs per local vertex. Sums to `C(k, 3)`.
pub fn good_pair_counts(times: &CliqueTimes) -> Vec<usize> {
    let k = times.k();
    let mut counts = vec![0; k];
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let (ab, ac, bc) = (times.time(a, b), times.time(a, c), times.time(b, c));
                let opposite = if ab > ac && ab > bc {
                    c
                } else if ac > bc {
                    b
                } else {
                    a
                };
                counts[opposite] += 1;
            }
        }
    }
    counts
}

/// Component pairs per local vertex, by replaying the edges through
/// union-find.
pub fn component_pair_counts(times: &CliqueTimes) -> Vec<usize> {
    let k = times.k();
    let mut counts = vec![0; k];
    let mut uf = UnionFind::new(k);
    let mut roots = vec![0; k];
    for (a, b) in times.edges_in_order() {
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            for (v, r) in roots.iter_mut().enumerate() {
                *r = uf.find(v);
            }
            for v in 0..k {
                if roots[v] == ra {
                    counts[v] += 1;
                }
            }
        } else {
            uf.union(a, b);
        }
    }
    counts
}
