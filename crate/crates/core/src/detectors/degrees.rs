//! High/low red-degree classification.

use serde::Serialize;

use crate::board::Vertex;
use crate::graph::RedAdjacency;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub d_hi: u64,
    pub degrees: Vec<usize>,
    pub high: Vec<bool>,
}

impl DegreeReport {
    pub fn is_high(&self, v: u32) -> bool {
        self.high[v as usize]
    }

    pub fn high_count(&self) -> usize {
        self.high.iter().filter(|&&h| h).count()
    }

    /// A block is high iff it contains a high vertex.
    pub fn block_flags(&self, blocks: &[Vec<Vertex>]) -> Vec<bool> {
        blocks.iter().map(|b| b.iter().any(|v| self.is_high(v.0))).collect()
    }
}

/// Flags every vertex with red degree `>= d_hi` as high.
pub fn classify_degrees<G: RedAdjacency + ?Sized>(g: &G, d_hi: u64) -> DegreeReport {
    let degrees: Vec<usize> = (0..g.vertex_count()).map(|v| g.red_degree(v)).collect();
    let high = degrees.iter().map(|&d| d as u64 >= d_hi).collect();
    DegreeReport { d_hi, degrees, high }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Board;
    use crate::graph::RedGraph;

    #[test]
    fn empty_board_is_all_low() {
        let b = Board::new(6).unwrap();
        let r = classify_degrees(&b, 1);
        assert_eq!(r.high_count(), 0);
    }

    #[test]
    fn star_center_is_the_only_high_vertex() {
        let g = RedGraph::from_edges(6, (1..6).map(|i| (0, i)));
        let r = classify_degrees(&g, 5);
        assert_eq!(r.high, vec![true, false, false, false, false, false]);
        let blocks = vec![
            vec![Vertex(0), Vertex(1), Vertex(2)],
            vec![Vertex(3), Vertex(4), Vertex(5)],
        ];
        assert_eq!(r.block_flags(&blocks), vec![true, false]);
        // threshold 0 makes everything high
        assert_eq!(classify_degrees(&g, 0).high_count(), 6);
    }
}
