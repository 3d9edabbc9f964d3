//! Addressing a red clique through red-neighbour positions.
//!
//! An [`EncodingVector`] `(y_1, z_1, y_2, …, z_{k−2}, y_{k−1})` names a
//! sequence `x_1 = v, x_2, …, x_k`: `x_2` is the `y_1`-th red neighbour of
//! `v`, and `x_{i+2}` is the `y_{i+1}`-th red neighbour of `x_{z_i}`.
//! Neighbour positions are 1-based in placement order.
//!
//! Vertices are listed in the order they join `v`'s component inside the
//! clique. When several join in one merge they are listed greedily: next is
//! the unlisted vertex of that merge whose earliest edge to the listed ones
//! is earliest. Every prefix is then connected at its merge time.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pairs::{component_pair_counts, good_pair_counts, CliqueTimes};
use super::DetectError;
use crate::board::{Board, Vertex};
use crate::graph::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingVector {
    pub ys: Vec<u32>,
    pub zs: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TParams {
    pub k: u32,
    pub d_hi: u64,
    pub pair_threshold: u64,
}

impl EncodingVector {
    pub fn new(ys: Vec<u32>, zs: Vec<u32>) -> Result<Self, String> {
        if ys.is_empty() || ys.len() != zs.len() + 1 {
            return Err(format!("need one more y than z, got {} and {}", ys.len(), zs.len()));
        }
        Ok(EncodingVector { ys, zs })
    }

    /// Clique size this vector addresses.
    pub fn k(&self) -> usize {
        self.ys.len() + 1
    }

    /// Interleaved `(y_1, z_1, y_2, …, y_{k−1})`.
    pub fn flat(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.ys.len() + self.zs.len());
        for (i, &y) in self.ys.iter().enumerate() {
            out.push(y);
            if let Some(&z) = self.zs.get(i) {
                out.push(z);
            }
        }
        out
    }

    pub fn from_flat(flat: &[u32]) -> Result<Self, String> {
        if flat.len().is_multiple_of(2) {
            return Err(format!("flat encoding must have odd length, got {}", flat.len()));
        }
        let ys = flat.iter().step_by(2).copied().collect();
        let zs = flat.iter().skip(1).step_by(2).copied().collect();
        Self::new(ys, zs)
    }

    /// Membership in Z: `1 <= y_i <= y_cap` and `1 <= z_i <= i + 1`.
    pub fn in_z(&self, y_cap: u64) -> bool {
        self.ys.iter().all(|&y| y >= 1 && u64::from(y) <= y_cap)
            && self.zs.iter().enumerate().all(|(i, &z)| z >= 1 && z as usize <= i + 2)
    }

    /// Some `i1 < i2` with `z_{i1} = z_{i2}` whose addressed positions
    /// `y_{i1+1}`, `y_{i2+1}` are decreasing.
    pub fn has_decreasing_repeat(&self) -> bool {
        self.repeat_with(|i| self.ys[i + 1])
    }

    /// Same as [`Self::has_decreasing_repeat`] but comparing `y_{i1}` with
    /// `y_{i2}`, one step before the positions the `z`s select.
    pub fn has_decreasing_repeat_shifted(&self) -> bool {
        self.repeat_with(|i| self.ys[i])
    }

    fn repeat_with(&self, y_of: impl Fn(usize) -> u32) -> bool {
        let m = self.zs.len();
        (0..m).any(|i1| (i1 + 1..m).any(|i2| self.zs[i1] == self.zs[i2] && y_of(i1) > y_of(i2)))
    }
}

impl fmt::Display for EncodingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.flat().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for EncodingVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let flat = s
            .split(',')
            .map(|p| {
                let p = p.trim();
                if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(format!("bad entry {p:?}"));
                }
                p.parse::<u32>().map_err(|e| format!("bad entry {p:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_flat(&flat)
    }
}

/// Time each local vertex joins local vertex 0's component (0 for itself).
pub fn appearance_times(times: &CliqueTimes) -> Vec<u64> {
    let k = times.k();
    let mut app = vec![u64::MAX; k];
    if k == 0 {
        return app;
    }
    app[0] = 0;
    let mut uf = UnionFind::new(k);
    let mut members: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    for (a, b) in times.edges_in_order() {
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            continue;
        }
        let home = uf.find(0);
        let t = times.time(a, b);
        if ra == home || rb == home {
            let other = if ra == home { rb } else { ra };
            for &w in &members[other] {
                app[w] = t;
            }
        }
        let root = uf.union(a, b).expect("distinct roots");
        let absorbed = if root == ra { rb } else { ra };
        let moved = std::mem::take(&mut members[absorbed]);
        members[root].extend(moved);
    }
    app
}

/// Appearance order with the greedy within-merge rule, starting at local 0.
pub fn canonical_order(times: &CliqueTimes) -> Vec<usize> {
    let k = times.k();
    let app = appearance_times(times);
    let mut order = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    let mut key = vec![u64::MAX; k];
    let place = |x: usize, order: &mut Vec<usize>, placed: &mut Vec<bool>, key: &mut Vec<u64>| {
        order.push(x);
        placed[x] = true;
        for c in 0..k {
            if !placed[c] {
                key[c] = key[c].min(times.time(x, c));
            }
        }
    };
    if k == 0 {
        return order;
    }
    place(0, &mut order, &mut placed, &mut key);
    while order.len() < k {
        let next = (0..k)
            .filter(|&c| !placed[c])
            .min_by_key(|&c| (app[c], key[c]))
            .expect("unplaced vertex");
        place(next, &mut order, &mut placed, &mut key);
    }
    order
}

fn position_in(list: &[u32], x: u32) -> Option<u32> {
    list.iter().position(|&w| w == x).map(|p| p as u32 + 1)
}

fn local_clique(clique: &[Vertex], v: Vertex) -> Result<Vec<Vertex>, DetectError> {
    if !clique.contains(&v) {
        return Err(DetectError::NotEncodable(format!("{v} is not in the clique")));
    }
    let mut local = vec![v];
    local.extend(clique.iter().copied().filter(|&w| w != v));
    let mut sorted: Vec<u32> = local.iter().map(|w| w.0).collect();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(DetectError::NotEncodable("repeated clique vertex".into()));
    }
    Ok(local)
}

fn clique_times(board: &Board, local: &[Vertex]) -> Result<CliqueTimes, DetectError> {
    if let Some(w) = local.iter().find(|w| w.0 >= board.n()) {
        return Err(DetectError::VertexOutOfRange {
            vertex: w.0,
            n: board.n(),
        });
    }
    CliqueTimes::from_board(board, local)
        .map_err(|_| DetectError::NotEncodable("vertices do not form a red clique".into()))
}

/// Encodes the red clique `clique` (containing `v`) as seen from `v`. Every
/// clique vertex must have red degree below `d_hi`.
pub fn encode_history(board: &Board, clique: &[Vertex], v: Vertex, d_hi: u64) -> Result<EncodingVector, DetectError> {
    let local = local_clique(clique, v)?;
    if local.len() < 2 {
        return Err(DetectError::NotEncodable("clique needs two vertices".into()));
    }
    let times = clique_times(board, &local)?;
    if let Some(w) = local.iter().find(|w| board.red_degree(w.0) as u64 >= d_hi) {
        return Err(DetectError::NotEncodable(format!(
            "{w} has red degree {} >= {d_hi}",
            board.red_degree(w.0)
        )));
    }
    let order = canonical_order(&times);
    let xs: Vec<u32> = order.iter().map(|&i| local[i].0).collect();
    let mut ys = Vec::with_capacity(xs.len() - 1);
    let mut zs = Vec::with_capacity(xs.len().saturating_sub(2));
    ys.push(position_in(board.red_neighbors(xs[0]), xs[1]).expect("clique edge is red"));
    for p in 2..xs.len() {
        let target = order[p];
        let m = (0..p)
            .min_by_key(|&j| times.time(order[j], target))
            .expect("nonempty prefix");
        zs.push(m as u32 + 1);
        ys.push(position_in(board.red_neighbors(xs[m]), xs[p]).expect("clique edge is red"));
    }
    Ok(EncodingVector { ys, zs })
}

/// Follows the addressing of `y` from `v`; `None` if a position is out of
/// range or a vertex repeats.
pub fn decode(board: &Board, v: u32, y: &EncodingVector) -> Option<Vec<u32>> {
    if v >= board.n() || y.ys.len() != y.zs.len() + 1 {
        return None;
    }
    let nth = |x: u32, pos: u32| -> Option<u32> { board.red_neighbors(x).get((pos as usize).checked_sub(1)?).copied() };
    let mut xs = vec![v, nth(v, y.ys[0])?];
    for (i, &z) in y.zs.iter().enumerate() {
        let anchor = *xs.get((z as usize).checked_sub(1)?)?;
        if z as usize > i + 2 {
            return None;
        }
        xs.push(nth(anchor, y.ys[i + 1])?);
    }
    let mut sorted = xs.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(xs)
}

/// The event T(v, y), including the greedy within-merge listing rule.
pub fn check_t(board: &Board, v: u32, y: &EncodingVector, params: &TParams) -> bool {
    check_t_impl(board, v, y, params, true)
}

/// The event T(v, y) with any listing order allowed among vertices that
/// join `v`'s component in the same merge.
pub fn check_t_relaxed(board: &Board, v: u32, y: &EncodingVector, params: &TParams) -> bool {
    check_t_impl(board, v, y, params, false)
}

fn check_t_impl(board: &Board, v: u32, y: &EncodingVector, params: &TParams, strict: bool) -> bool {
    if y.k() != params.k as usize || !y.in_z(params.d_hi) {
        return false;
    }
    let Some(xs) = decode(board, v, y) else {
        return false;
    };
    // red clique of low-degree vertices
    if xs.iter().any(|&x| board.red_degree(x) as u64 >= params.d_hi) {
        return false;
    }
    let local: Vec<Vertex> = xs.iter().map(|&x| Vertex(x)).collect();
    let Ok(times) = CliqueTimes::from_board(board, &local) else {
        return false;
    };
    // enough component pairs at v
    if (component_pair_counts(&times)[0] as u64) < params.pair_threshold {
        return false;
    }
    // first-connector rule
    for (i, &z) in y.zs.iter().enumerate() {
        let target = i + 2;
        let first = (0..target)
            .min_by_key(|&j| times.time(j, target))
            .expect("nonempty prefix");
        if first + 1 != z as usize {
            return false;
        }
    }
    // listing follows appearance in v's component
    let app = appearance_times(&times);
    if app.windows(2).any(|w| w[0] > w[1]) {
        return false;
    }
    if strict {
        let canonical: Vec<usize> = (0..xs.len()).collect();
        if canonical_order(&times) != canonical {
            return false;
        }
    }
    true
}

/// Positions of the other clique vertices in `v`'s red neighbour list,
/// increasing.
pub fn encode_ordered(board: &Board, clique: &[Vertex], v: Vertex) -> Result<Vec<u32>, DetectError> {
    let local = local_clique(clique, v)?;
    clique_times(board, &local)?;
    let nbrs = board.red_neighbors(v.0);
    let mut ys: Vec<u32> = local[1..]
        .iter()
        .map(|w| position_in(nbrs, w.0).expect("clique edge is red"))
        .collect();
    ys.sort_unstable();
    Ok(ys)
}

/// The good-pair event T(v, y) for increasing positions `ys`.
pub fn check_t_ordered(board: &Board, v: u32, ys: &[u32], params: &TParams) -> bool {
    if v >= board.n() || ys.len() + 1 != params.k as usize || ys.is_empty() {
        return false;
    }
    if ys[0] < 1 || ys.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    if u64::from(*ys.last().expect("nonempty")) > params.d_hi {
        return false;
    }
    let nbrs = board.red_neighbors(v);
    let mut local = vec![Vertex(v)];
    for &y in ys {
        match nbrs.get(y as usize - 1) {
            Some(&w) => local.push(Vertex(w)),
            None => return false,
        }
    }
    let Ok(times) = CliqueTimes::from_board(board, &local) else {
        return false;
    };
    good_pair_counts(&times)[0] as u64 >= params.pair_threshold
}
