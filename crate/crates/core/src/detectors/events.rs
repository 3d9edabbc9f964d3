//! The per-vertex events X(v), Y(v) and S(v) = X(v) and Y(v).

use serde::Serialize;

use super::pairs::{component_pair_counts, good_pair_counts, CliqueTimes};
use super::thresholds::Variant;
use super::DetectError;
use crate::board::{Board, Vertex};

pub const DEFAULT_NEIGHBORHOOD_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EventParams {
    pub k: u32,
    pub d_hi: u64,
    pub pair_threshold: u64,
    pub variant: Variant,
    pub neighborhood_cap: usize,
}

impl EventParams {
    pub fn new(k: u32, d_hi: u64, pair_threshold: u64, variant: Variant) -> Self {
        EventParams {
            k,
            d_hi,
            pair_threshold,
            variant,
            neighborhood_cap: DEFAULT_NEIGHBORHOOD_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventReport {
    pub vertex: Vertex,
    pub x: bool,
    /// `None` when `v` is high degree and its neighbourhood exceeds the
    /// search cap; S(v) is false either way.
    pub y: Option<bool>,
    pub s: bool,
    /// `v` followed by the other clique vertices, sorted.
    pub witness: Option<Vec<Vertex>>,
    /// Counted pairs at `v` for the witness, or the best seen when Y fails.
    pub counted_pairs: usize,
}

/// Counted pairs at local vertex 0 of `clique`.
pub fn counted_pairs_at(board: &Board, clique: &[Vertex], variant: Variant) -> Result<usize, DetectError> {
    let times = CliqueTimes::from_board(board, clique)?;
    Ok(match variant {
        Variant::S2 => good_pair_counts(&times)[0],
        Variant::S3 => component_pair_counts(&times)[0],
    })
}

pub fn detect_events(board: &Board, v: u32, params: &EventParams) -> Result<EventReport, DetectError> {
    if v >= board.n() {
        return Err(DetectError::VertexOutOfRange {
            vertex: v,
            n: board.n(),
        });
    }
    let is_low = |x: u32| (board.red_degree(x) as u64) < params.d_hi;
    let x = is_low(v);
    let mut candidates: Vec<u32> = board
        .red_neighbors(v)
        .iter()
        .copied()
        .filter(|&w| params.variant == Variant::S2 || is_low(w))
        .collect();
    candidates.sort_unstable();

    let need = params.k.saturating_sub(1) as usize;
    let mut report = EventReport {
        vertex: Vertex(v),
        x,
        y: Some(false),
        s: false,
        witness: None,
        counted_pairs: 0,
    };
    if need == 0 || candidates.len() < need {
        return Ok(report);
    }
    if candidates.len() > params.neighborhood_cap {
        if !x {
            report.y = None;
            return Ok(report);
        }
        return Err(DetectError::NeighborhoodTooLarge {
            vertex: v,
            size: candidates.len(),
            cap: params.neighborhood_cap,
        });
    }

    let mut search = Search {
        board,
        v,
        need,
        params,
        acc: Vec::with_capacity(need),
        best: 0,
        found: None,
    };
    search.run(&candidates)?;
    report.counted_pairs = search.best;
    if let Some(w) = search.found {
        report.y = Some(true);
        report.counted_pairs = w.1;
        report.witness = Some(w.0);
    }
    report.s = report.x && report.y == Some(true);
    Ok(report)
}

struct Search<'a> {
    board: &'a Board,
    v: u32,
    need: usize,
    params: &'a EventParams,
    acc: Vec<u32>,
    best: usize,
    found: Option<(Vec<Vertex>, usize)>,
}

impl Search<'_> {
    /// Enumerates red cliques of size `need` among `cands` in lexicographic
    /// order, stopping at the first that meets the pair threshold.
    fn run(&mut self, cands: &[u32]) -> Result<bool, DetectError> {
        if self.acc.len() == self.need {
            let mut clique = Vec::with_capacity(self.need + 1);
            clique.push(Vertex(self.v));
            clique.extend(self.acc.iter().map(|&w| Vertex(w)));
            let c = counted_pairs_at(self.board, &clique, self.params.variant)?;
            self.best = self.best.max(c);
            if c as u64 >= self.params.pair_threshold {
                self.found = Some((clique, c));
                return Ok(true);
            }
            return Ok(false);
        }
        for (i, &c) in cands.iter().enumerate() {
            if self.acc.len() + (cands.len() - i) < self.need {
                break;
            }
            let next: Vec<u32> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&w| self.board.is_red(c, w))
                .collect();
            self.acc.push(c);
            let done = self.run(&next)?;
            self.acc.pop();
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
