use std::fmt;

use serde::Serialize;

use super::exact_cover::ExactCover;
use super::DetectError;
use crate::board::{Board, Vertex};
use crate::graph::{for_each_clique, RedAdjacency};

/// A partition of all vertices into red `K_k`'s. Blocks are sorted, and each
/// block's vertices are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorWitness {
    pub k: u32,
    pub blocks: Vec<Vec<Vertex>>,
}

impl FactorWitness {
    pub fn from_blocks(k: u32, blocks: Vec<Vec<u32>>) -> Self {
        let mut blocks: Vec<Vec<Vertex>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.into_iter().map(Vertex).collect()
            })
            .collect();
        blocks.sort();
        FactorWitness { k, blocks }
    }

    /// Blocks are disjoint, of size `k`, cover `0..n`, and are pairwise red.
    pub fn verify<G: RedAdjacency + ?Sized>(&self, g: &G) -> bool {
        let n = g.vertex_count() as usize;
        let mut seen = vec![false; n];
        for block in &self.blocks {
            if block.len() != self.k as usize {
                return false;
            }
            for (i, a) in block.iter().enumerate() {
                if a.0 as usize >= n || std::mem::replace(&mut seen[a.0 as usize], true) {
                    return false;
                }
                if block[i + 1..].iter().any(|b| !g.is_red(a.0, b.0)) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for FactorWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str("{")?;
            for (j, v) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Red `K_k`-factor of the board, if one exists.
pub fn find_red_factor(board: &Board, k: u32) -> Result<Option<FactorWitness>, DetectError> {
    find_factor(board, k)
}

/// Solves factor detection as exact cover of the vertices by red `k`-cliques.
pub fn find_factor<G: RedAdjacency + ?Sized>(g: &G, k: u32) -> Result<Option<FactorWitness>, DetectError> {
    let n = g.vertex_count();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(DetectError::Indivisible { n, k });
    }
    if k == 1 {
        return Ok(Some(FactorWitness::from_blocks(1, (0..n).map(|v| vec![v]).collect())));
    }
    // cheap necessary condition before enumerating anything
    if (0..n).any(|v| g.red_degree(v) + 1 < k as usize) {
        return Ok(None);
    }
    let k = k as usize;
    let mut flat: Vec<u32> = Vec::new();
    for_each_clique(g, k, |c| flat.extend_from_slice(c));
    let mut cliques: Vec<&[u32]> = flat.chunks_exact(k).collect();
    cliques.sort_unstable();

    let mut covered = vec![false; n as usize];
    for c in &cliques {
        for &v in *c {
            covered[v as usize] = true;
        }
    }
    if covered.iter().any(|&c| !c) {
        return Ok(None);
    }

    let mut problem = ExactCover::new(n as usize);
    let mut items = Vec::with_capacity(k);
    for c in &cliques {
        items.clear();
        items.extend(c.iter().map(|&v| v as usize));
        problem.add_option(&items);
    }
    Ok(problem
        .solve()
        .map(|rows| FactorWitness::from_blocks(k as u32, rows.into_iter().map(|r| cliques[r].to_vec()).collect())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RedGraph;

    #[test]
    fn two_disjoint_triangles() {
        let g = RedGraph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let w = find_factor(&g, 3).unwrap().unwrap();
        assert_eq!(w.to_string(), "{0,1,2} {3,4,5}");
        assert!(w.verify(&g));
    }

    #[test]
    fn six_cycle_has_no_triangle_factor() {
        let g = RedGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]);
        assert_eq!(find_factor(&g, 3).unwrap(), None);
        // but it has a perfect matching
        assert!(find_factor(&g, 2).unwrap().is_some());
    }

    #[test]
    fn indivisible() {
        let g = RedGraph::new(7);
        assert_eq!(find_factor(&g, 3), Err(DetectError::Indivisible { n: 7, k: 3 }));
    }

    #[test]
    fn overlapping_cliques() {
        // K_4 on {0,1,2,3} plus triangle {3,4,5}: the only factor with
        // triangles uses {0,1,2} and {3,4,5}, though {1,2,3} etc. are red too
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        edges.extend([(3, 4), (4, 5), (3, 5)]);
        let g = RedGraph::from_edges(6, edges);
        let w = find_factor(&g, 3).unwrap().unwrap();
        assert_eq!(w.to_string(), "{0,1,2} {3,4,5}");
    }

    #[test]
    fn verify_rejects_bad_witnesses() {
        let g = RedGraph::from_edges(4, [(0, 1), (2, 3)]);
        let good = FactorWitness::from_blocks(2, vec![vec![0, 1], vec![2, 3]]);
        assert!(good.verify(&g));
        let overlap = FactorWitness::from_blocks(2, vec![vec![0, 1], vec![1, 3]]);
        assert!(!overlap.verify(&g));
        let not_red = FactorWitness::from_blocks(2, vec![vec![0, 2], vec![1, 3]]);
        assert!(!not_red.verify(&g));
    }
}
