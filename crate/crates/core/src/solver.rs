//! Exact game values on small boards by memoized minimax.
//!
//! A position is the pair of red and blue edge masks (at most 32 edges, so
//! `n ≤ 8`). Its value is the number of further rounds Waiter needs to force
//! the goal against best Client play, or [`GameValue::ClientWins`].

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;
use serde::Serialize;
use thiserror::Error;

use crate::board::{edge_count, Board, Edge, Offer};
use crate::goal::{GoalError, GoalSpec};
use crate::strategy::{StrategyError, Waiter};

pub const MAX_SOLVER_N: u32 = 8;
/// Roughly 8 GiB of table entries.
pub const DEFAULT_BUDGET: u64 = 400_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("solver handles n ≤ {MAX_SOLVER_N}, got {0}")]
    TooLarge(u32),
    #[error(transparent)]
    Goal(#[from] GoalError),
    #[error("state budget of {0} entries exceeded")]
    ResourceLimit(u64),
    #[error("no legal offer remains")]
    GameOver,
    #[error("board does not belong to this solver (n = {got}, expected {expected})")]
    WrongBoard { got: u32, expected: u32 },
    #[error("could not start worker pool: {0}")]
    Workers(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "rounds", rename_all = "snake_case")]
pub enum GameValue {
    WaiterWins(u32),
    ClientWins,
}

impl GameValue {
    /// Waiter prefers smaller ranks.
    fn rank(self) -> u32 {
        match self {
            GameValue::WaiterWins(r) => r,
            GameValue::ClientWins => u32::MAX,
        }
    }

    fn from_code(c: u8) -> Self {
        if c == u8::MAX {
            GameValue::ClientWins
        } else {
            GameValue::WaiterWins(u32::from(c))
        }
    }

    fn code(self) -> u8 {
        match self {
            GameValue::WaiterWins(r) => r as u8,
            GameValue::ClientWins => u8::MAX,
        }
    }

    fn plus_one(self) -> Self {
        match self {
            GameValue::WaiterWins(r) => GameValue::WaiterWins(r + 1),
            GameValue::ClientWins => GameValue::ClientWins,
        }
    }
}

impl fmt::Display for GameValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameValue::WaiterWins(r) => write!(f, "WaiterWins({r})"),
            GameValue::ClientWins => f.write_str("ClientWins"),
        }
    }
}

/// Canonical position key: red mask in the high half, blue in the low half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(pub u64);

/// Two edge positions, smaller first.
type EdgePair = (u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub isomorphism: bool,
    pub budget: u64,
    /// `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            isomorphism: false,
            budget: DEFAULT_BUDGET,
            workers: None,
        }
    }
}

fn pack(red: u32, blue: u32) -> u64 {
    (u64::from(red) << 32) | u64::from(blue)
}

/// Red and blue masks of a board with at most 32 edges.
pub fn board_masks(board: &Board) -> Result<(u32, u32), SolveError> {
    if board.n() > MAX_SOLVER_N {
        return Err(SolveError::TooLarge(board.n()));
    }
    let (mut red, mut blue) = (0u32, 0u32);
    for (e, c) in board.claimed_edges() {
        match c.color {
            crate::board::EdgeColor::Red => red |= 1 << e.index(),
            crate::board::EdgeColor::Blue => blue |= 1 << e.index(),
            crate::board::EdgeColor::Unclaimed => {}
        }
    }
    Ok((red, blue))
}

/// Vertex permutations as edge-index maps.
fn edge_permutations(n: u32) -> Vec<Vec<u8>> {
    use itertools::Itertools;
    (0..n)
        .permutations(n as usize)
        .map(|p| {
            (0..edge_count(n))
                .map(|i| {
                    let e = Edge::from_index(i);
                    Edge::new(p[e.u() as usize], p[e.v() as usize])
                        .expect("permutation keeps endpoints distinct")
                        .index() as u8
                })
                .collect()
        })
        .collect()
}

fn permute(mask: u32, map: &[u8]) -> u32 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << map[i];
        m &= m - 1;
    }
    out
}

/// Position key of `board`; with `isomorphism` the least key over all vertex
/// relabellings, so isomorphic boards agree.
pub fn canonical_key(board: &Board, isomorphism: bool) -> Result<StateKey, SolveError> {
    let (red, blue) = board_masks(board)?;
    if !isomorphism {
        return Ok(StateKey(pack(red, blue)));
    }
    Ok(StateKey(
        edge_permutations(board.n())
            .iter()
            .map(|p| pack(permute(red, p), permute(blue, p)))
            .min()
            .expect("at least the identity"),
    ))
}

/// Edge masks of every way to satisfy the goal on `K_n`.
fn goal_masks(n: u32, goal: GoalSpec) -> Vec<u32> {
    use itertools::Itertools;
    let clique_mask = |vs: &[u32]| {
        let mut m = 0u32;
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                m |= 1 << Edge::new(a, b).expect("distinct").index();
            }
        }
        m
    };
    match goal {
        GoalSpec::SingleClique(l) => (0..n).combinations(l as usize).map(|c| clique_mask(&c)).collect(),
        GoalSpec::CliqueFactor(k) => {
            fn partitions(rest: Vec<u32>, k: usize, acc: u32, out: &mut Vec<u32>, f: &dyn Fn(&[u32]) -> u32) {
                if rest.is_empty() {
                    out.push(acc);
                    return;
                }
                let first = rest[0];
                for others in rest[1..].iter().copied().combinations(k - 1) {
                    let mut block = vec![first];
                    block.extend(&others);
                    let left: Vec<u32> = rest.iter().copied().filter(|v| !block.contains(v)).collect();
                    partitions(left, k, acc | f(&block), out, f);
                }
            }
            let mut out = Vec::new();
            partitions((0..n).collect(), k as usize, 0, &mut out, &clique_mask);
            out
        }
    }
}

/// Memoized minimax for one `(n, goal)`. The table persists across queries.
pub struct Solver {
    n: u32,
    goal: GoalSpec,
    edges: u32,
    full: u32,
    masks: Vec<u32>,
    perms: Option<Vec<Vec<u8>>>,
    table: DashMap<u64, u8, FxBuildHasher>,
    entries: AtomicU64,
    budget: u64,
    pool: Option<rayon::ThreadPool>,
}

impl fmt::Debug for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solver")
            .field("n", &self.n)
            .field("goal", &self.goal)
            .field("states", &self.states())
            .finish()
    }
}

impl Solver {
    pub fn new(n: u32, goal: GoalSpec, options: SolverOptions) -> Result<Self, SolveError> {
        if n > MAX_SOLVER_N {
            return Err(SolveError::TooLarge(n));
        }
        goal.validate_for(n)?;
        let edges = edge_count(n) as u32;
        let pool = match options.workers {
            Some(w) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(w.max(1))
                    .build()
                    .map_err(|e| SolveError::Workers(e.to_string()))?,
            ),
            None => None,
        };
        Ok(Solver {
            n,
            goal,
            edges,
            full: if edges == 32 { u32::MAX } else { (1u32 << edges) - 1 },
            masks: goal_masks(n, goal),
            perms: options.isomorphism.then(|| edge_permutations(n)),
            table: DashMap::with_hasher(FxBuildHasher),
            entries: AtomicU64::new(0),
            budget: options.budget,
            pool,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn goal(&self) -> GoalSpec {
        self.goal
    }

    /// Positions stored in the table.
    pub fn states(&self) -> u64 {
        self.entries.load(Ordering::Relaxed)
    }

    fn key(&self, red: u32, blue: u32) -> u64 {
        match &self.perms {
            None => pack(red, blue),
            Some(ps) => ps
                .iter()
                .map(|p| pack(permute(red, p), permute(blue, p)))
                .min()
                .expect("identity"),
        }
    }

    #[allow(clippy::manual_contains)]
    fn won(&self, red: u32) -> bool {
        self.masks.iter().any(|&m| m & red == m)
    }

    /// Fewest further red edges any still-reachable goal needs, or `None`.
    fn lower_bound(&self, red: u32, blue: u32) -> Option<u32> {
        self.masks
            .iter()
            .filter(|&&m| m & blue == 0)
            .map(|&m| (m & !red).count_ones())
            .min()
    }

    fn free_edges(&self, red: u32, blue: u32) -> Vec<u32> {
        let free = self.full & !(red | blue);
        (0..self.edges).filter(|i| free >> i & 1 == 1).collect()
    }

    fn value_of(&self, red: u32, blue: u32) -> Result<GameValue, SolveError> {
        if self.won(red) {
            return Ok(GameValue::WaiterWins(0));
        }
        let Some(lb) = self.lower_bound(red, blue) else {
            return Ok(GameValue::ClientWins);
        };
        let free = self.free_edges(red, blue);
        if free.len() < 2 {
            return Ok(GameValue::ClientWins);
        }
        let key = self.key(red, blue);
        if let Some(c) = self.table.get(&key) {
            return Ok(GameValue::from_code(*c));
        }
        let mut best = GameValue::ClientWins;
        'offers: for (i, &a) in free.iter().enumerate() {
            for &b in &free[i + 1..] {
                let v = self.offer_value(red, blue, a, b, best)?;
                if v.rank() < best.rank() {
                    best = v;
                    if best.rank() <= lb.max(1) {
                        break 'offers;
                    }
                }
            }
        }
        if self.table.insert(key, best.code()).is_none()
            && self.entries.fetch_add(1, Ordering::Relaxed) + 1 > self.budget
        {
            return Err(SolveError::ResourceLimit(self.budget));
        }
        Ok(best)
    }

    /// Value of offering edges `a` and `b`. Once one reply is already no
    /// better for Waiter than `cut`, the other reply is skipped and the
    /// result is only a lower bound.
    fn offer_value(&self, red: u32, blue: u32, a: u32, b: u32, cut: GameValue) -> Result<GameValue, SolveError> {
        let (ba, bb) = (1u32 << a, 1u32 << b);
        let first = self.value_of(red | ba, blue | bb)?.plus_one();
        if first.rank() >= cut.rank() {
            return Ok(first);
        }
        let second = self.value_of(red | bb, blue | ba)?.plus_one();
        Ok(if second.rank() > first.rank() { second } else { first })
    }

    fn exact_offer_value(&self, red: u32, blue: u32, a: u32, b: u32) -> Result<GameValue, SolveError> {
        self.offer_value(red, blue, a, b, GameValue::ClientWins)
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    fn check_board(&self, board: &Board) -> Result<(u32, u32), SolveError> {
        if board.n() != self.n {
            return Err(SolveError::WrongBoard {
                got: board.n(),
                expected: self.n,
            });
        }
        board_masks(board)
    }

    /// Value of every offer from the position, in `(a, b)` index order. The
    /// top level is spread over the worker pool.
    fn offer_values(&self, red: u32, blue: u32) -> Result<Vec<(EdgePair, GameValue)>, SolveError> {
        let free = self.free_edges(red, blue);
        let pairs: Vec<(u32, u32)> = free
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| free[i + 1..].iter().map(move |&b| (a, b)))
            .collect();
        self.run(|| {
            pairs
                .par_iter()
                .map(|&(a, b)| Ok(((a, b), self.exact_offer_value(red, blue, a, b)?)))
                .collect()
        })
    }

    pub fn value(&self, board: &Board) -> Result<GameValue, SolveError> {
        let (red, blue) = self.check_board(board)?;
        if self.won(red) {
            return Ok(GameValue::WaiterWins(0));
        }
        if self.free_edges(red, blue).len() < 2 || self.lower_bound(red, blue).is_none() {
            return Ok(GameValue::ClientWins);
        }
        let values = self.offer_values(red, blue)?;
        Ok(values
            .into_iter()
            .map(|(_, v)| v)
            .min_by_key(|v| v.rank())
            .unwrap_or(GameValue::ClientWins))
    }

    /// An offer achieving the position's value, ties to the smallest pair of
    /// edge indices. When Client wins anyway, see [`Solver::best_effort_offer`].
    pub fn best_offer(&self, board: &Board) -> Result<(Offer, GameValue), SolveError> {
        let (red, blue) = self.check_board(board)?;
        let values = self.offer_values(red, blue)?;
        let ((a, b), v) = values
            .iter()
            .copied()
            .min_by_key(|&(pair, v)| (v.rank(), pair))
            .ok_or(SolveError::GameOver)?;
        if v == GameValue::ClientWins {
            return Ok((self.best_effort_offer(red, blue, &values)?, v));
        }
        Ok((offer_of(a, b), v))
    }

    /// For positions Client wins: prefer offers where more of Client's
    /// replies lose, then offers keeping the most goal sets reachable after
    /// the worse reply, then the smallest index pair.
    fn best_effort_offer(&self, red: u32, blue: u32, values: &[((u32, u32), GameValue)]) -> Result<Offer, SolveError> {
        let reachable = |b: u32| self.masks.iter().filter(|&&m| m & b == 0).count();
        let mut best: Option<((usize, usize), std::cmp::Reverse<EdgePair>)> = None;
        for &((a, b), _) in values {
            let (ba, bb) = (1u32 << a, 1u32 << b);
            let replies = [(red | ba, blue | bb), (red | bb, blue | ba)];
            let mut losing = 0;
            let mut worst = usize::MAX;
            for (r, bl) in replies {
                if self.value_of(r, bl)? != GameValue::ClientWins {
                    losing += 1;
                }
                worst = worst.min(reachable(bl));
            }
            let score = ((losing, worst), std::cmp::Reverse((a, b)));
            if best.is_none_or(|s| score > s) {
                best = Some(score);
            }
        }
        let (_, std::cmp::Reverse((a, b))) = best.ok_or(SolveError::GameOver)?;
        Ok(offer_of(a, b))
    }

    /// Best offers and Client's most stubborn replies from `board` to the end.
    /// Client ties go to the offer's first edge.
    pub fn principal_variation(&self, board: &Board) -> Result<Vec<(Offer, Edge)>, SolveError> {
        let mut b = board.clone();
        let mut pv = Vec::new();
        loop {
            let (red, blue) = self.check_board(&b)?;
            if self.won(red) || self.free_edges(red, blue).len() < 2 {
                return Ok(pv);
            }
            let (offer, _) = self.best_offer(&b)?;
            let (ia, ib) = (offer.first().index() as u32, offer.second().index() as u32);
            let va = self.value_of(red | 1 << ia, blue | 1 << ib)?;
            let vb = self.value_of(red | 1 << ib, blue | 1 << ia)?;
            let choice = if vb.rank() > va.rank() {
                offer.second()
            } else {
                offer.first()
            };
            b.apply_round(offer, choice).expect("solver offers are legal");
            pv.push((offer, choice));
        }
    }
}

fn offer_of(a: u32, b: u32) -> Offer {
    Offer::new(Edge::from_index(u64::from(a)), Edge::from_index(u64::from(b))).expect("distinct")
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub n: u32,
    pub goal: GoalSpec,
    pub value: GameValue,
    pub principal_variation: Vec<(u64, u64, u64)>,
    pub states: u64,
}

/// Value of the empty board, with a principal variation as
/// `(first, second, chosen)` edge indices.
pub fn solve(n: u32, goal: GoalSpec, options: SolverOptions) -> Result<SolveReport, SolveError> {
    let solver = Solver::new(n, goal, options)?;
    let board = Board::new(n).map_err(|_| SolveError::TooLarge(n))?;
    let value = solver.value(&board)?;
    let pv = solver
        .principal_variation(&board)?
        .into_iter()
        .map(|(o, c)| (o.first().index(), o.second().index(), c.index()))
        .collect();
    Ok(SolveReport {
        n,
        goal,
        value,
        principal_variation: pv,
        states: solver.states(),
    })
}

/// Waiter playing [`Solver::best_offer`] every round.
#[derive(Debug)]
pub struct SolverWaiter {
    solver: Solver,
}

impl SolverWaiter {
    pub fn new(n: u32, goal: GoalSpec) -> Result<Self, SolveError> {
        Self::with_options(
            n,
            goal,
            SolverOptions {
                isomorphism: true,
                ..SolverOptions::default()
            },
        )
    }

    pub fn with_options(n: u32, goal: GoalSpec, options: SolverOptions) -> Result<Self, SolveError> {
        let solver = Solver::new(n, goal, options)?;
        Ok(SolverWaiter { solver })
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }
}

impl Waiter for SolverWaiter {
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError> {
        if !board.can_continue() {
            return Ok(None);
        }
        match self.solver.best_offer(board) {
            Ok((o, _)) => Ok(Some(o)),
            Err(SolveError::GameOver) => Ok(None),
            Err(e) => Err(StrategyError::Solver(e.to_string())),
        }
    }
}
