//! Red-graph views and the small graph routines the detectors share.

use rustc_hash::FxHashSet;

use crate::board::{Board, Edge};

/// Read access to a red graph on vertices `0..vertex_count()`.
pub trait RedAdjacency {
    fn vertex_count(&self) -> u32;
    fn red_neighbors(&self, v: u32) -> &[u32];
    fn is_red(&self, a: u32, b: u32) -> bool;

    fn red_degree(&self, v: u32) -> usize {
        self.red_neighbors(v).len()
    }
}

impl RedAdjacency for Board {
    fn vertex_count(&self) -> u32 {
        self.n()
    }

    fn red_neighbors(&self, v: u32) -> &[u32] {
        Board::red_neighbors(self, v)
    }

    fn is_red(&self, a: u32, b: u32) -> bool {
        Board::is_red(self, a, b)
    }
}

/// A plain red graph, for inputs that did not come from a game.
#[derive(Debug, Clone, Default)]
pub struct RedGraph {
    adj: Vec<Vec<u32>>,
    edges: FxHashSet<u64>,
}

impl RedGraph {
    pub fn new(n: u32) -> Self {
        RedGraph {
            adj: vec![Vec::new(); n as usize],
            edges: FxHashSet::default(),
        }
    }

    pub fn from_edges(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut g = RedGraph::new(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Adds `ab`; returns false for loops and repeats.
    pub fn add_edge(&mut self, a: u32, b: u32) -> bool {
        if a == b || a as usize >= self.adj.len() || b as usize >= self.adj.len() {
            return false;
        }
        if !self.edges.insert(Edge::of(a, b).index()) {
            return false;
        }
        self.adj[a as usize].push(b);
        self.adj[b as usize].push(a);
        true
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

impl RedAdjacency for RedGraph {
    fn vertex_count(&self) -> u32 {
        self.adj.len() as u32
    }

    fn red_neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    fn is_red(&self, a: u32, b: u32) -> bool {
        a != b && self.edges.contains(&Edge::of(a, b).index())
    }
}

/// Disjoint sets with union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns the new root if the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some(ra)
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Common red neighbours of `a` and `b`, scanning the smaller list.
pub fn common_neighbors<G: RedAdjacency + ?Sized>(g: &G, a: u32, b: u32) -> Vec<u32> {
    let (small, other) = if g.red_degree(a) <= g.red_degree(b) {
        (a, b)
    } else {
        (b, a)
    };
    g.red_neighbors(small)
        .iter()
        .copied()
        .filter(|&w| w != other && g.is_red(w, other))
        .collect()
}

/// Finds a red clique of exactly `size` vertices inside `candidates`.
pub fn find_clique_in<G: RedAdjacency + ?Sized>(g: &G, candidates: &[u32], size: usize) -> Option<Vec<u32>> {
    fn go<G: RedAdjacency + ?Sized>(g: &G, cands: &[u32], size: usize, acc: &mut Vec<u32>) -> bool {
        if acc.len() == size {
            return true;
        }
        for (i, &c) in cands.iter().enumerate() {
            if acc.len() + (cands.len() - i) < size {
                return false;
            }
            let next: Vec<u32> = cands[i + 1..].iter().copied().filter(|&w| g.is_red(c, w)).collect();
            acc.push(c);
            if go(g, &next, size, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::with_capacity(size);
    go(g, candidates, size, &mut acc).then_some(acc)
}

/// Calls `f` once for every red `k`-clique. Vertices are oriented by
/// (degree, id) so high-degree hubs only see their few higher-ranked
/// neighbours. Each clique is reported sorted ascending.
pub fn for_each_clique<G, F>(g: &G, k: usize, mut f: F)
where
    G: RedAdjacency + ?Sized,
    F: FnMut(&[u32]),
{
    let n = g.vertex_count() as usize;
    if k == 0 || k > n {
        return;
    }
    if k == 1 {
        for v in 0..n as u32 {
            f(&[v]);
        }
        return;
    }
    let rank_key = |v: u32| (g.red_degree(v), v);
    let out: Vec<Vec<u32>> = (0..n as u32)
        .map(|v| {
            let mut o: Vec<u32> = g
                .red_neighbors(v)
                .iter()
                .copied()
                .filter(|&w| rank_key(w) > rank_key(v))
                .collect();
            o.sort_unstable_by_key(|&w| rank_key(w));
            o
        })
        .collect();

    fn extend<G: RedAdjacency + ?Sized, F: FnMut(&[u32])>(
        g: &G,
        k: usize,
        cands: &[u32],
        acc: &mut Vec<u32>,
        sorted: &mut Vec<u32>,
        f: &mut F,
    ) {
        if acc.len() == k {
            sorted.clear();
            sorted.extend_from_slice(acc);
            sorted.sort_unstable();
            f(sorted);
            return;
        }
        for (i, &c) in cands.iter().enumerate() {
            if acc.len() + (cands.len() - i) < k {
                return;
            }
            let next: Vec<u32> = if acc.len() + 1 == k {
                Vec::new()
            } else {
                cands[i + 1..].iter().copied().filter(|&w| g.is_red(c, w)).collect()
            };
            acc.push(c);
            extend(g, k, &next, acc, sorted, f);
            acc.pop();
        }
    }

    let mut acc = Vec::with_capacity(k);
    let mut sorted = Vec::with_capacity(k);
    for v in 0..n as u32 {
        let o = &out[v as usize];
        if o.len() + 1 < k {
            continue;
        }
        acc.push(v);
        extend(g, k, o, &mut acc, &mut sorted, &mut f);
        acc.pop();
    }
}
