//! Running one game between a Waiter and a Client.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Board, BoardError, Edge, Vertex};
use crate::detectors::{find_red_factor, FactorWitness};
use crate::goal::{GoalError, GoalSpec};
use crate::graph::{common_neighbors, for_each_clique, RedAdjacency, RedGraph};
use crate::strategy::{Client, StrategyError, Waiter};
use crate::transcript::Transcript;

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Goal(#[from] GoalError),
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error("round {round}: {source}")]
    Strategy {
        round: u64,
        #[source]
        source: StrategyError,
    },
    #[error("round {round}: waiter offered an illegal pair: {source}")]
    IllegalOffer {
        round: u64,
        #[source]
        source: BoardError,
    },
    #[error("round {round}: client picked an edge outside the offer")]
    IllegalChoice { round: u64 },
}

/// What happens to a single unclaimed edge left when the game stops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoneEdgePolicy {
    #[default]
    StaysUnclaimed,
    ToWaiter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameConfig {
    pub n: u32,
    pub goal: GoalSpec,
    /// Defaults to the board capacity.
    pub round_cap: Option<u64>,
    pub lone_edge: LoneEdgePolicy,
    pub seed: Option<u64>,
}

impl GameConfig {
    pub fn new(n: u32, goal: GoalSpec) -> Self {
        GameConfig {
            n,
            goal,
            round_cap: None,
            lone_edge: LoneEdgePolicy::default(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    WaiterWins,
    ClientSurvives,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::WaiterWins => "waiter_wins",
            Outcome::ClientSurvives => "client_survives",
        })
    }
}

/// Why the game loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GoalReached,
    BoardExhausted,
    WaiterStopped,
    RoundCap,
}

/// Proof of a Waiter win.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Clique(Vec<Vertex>),
    Factor(FactorWitness),
}

impl Witness {
    pub fn blocks(&self) -> Vec<Vec<u32>> {
        match self {
            Witness::Clique(c) => vec![c.iter().map(|v| v.0).collect()],
            Witness::Factor(f) => f.blocks.iter().map(|b| b.iter().map(|v| v.0).collect()).collect(),
        }
    }

    /// Every block is a red clique of the goal's size; a factor also covers
    /// all vertices exactly once.
    pub fn verify<G: RedAdjacency + ?Sized>(&self, g: &G, goal: GoalSpec) -> bool {
        match (self, goal) {
            (Witness::Clique(c), GoalSpec::SingleClique(l)) => {
                c.len() == l as usize
                    && c.iter()
                        .enumerate()
                        .all(|(i, a)| c[i + 1..].iter().all(|b| a != b && g.is_red(a.0, b.0)))
            }
            (Witness::Factor(f), GoalSpec::CliqueFactor(k)) => f.k == k && f.verify(g),
            _ => false,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Clique(c) => {
                f.write_str("{")?;
                for (i, v) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Witness::Factor(w) => w.fmt(f),
        }
    }
}

/// Watches the red graph grow and reports the first time the goal holds.
///
/// For a clique goal only cliques through the newest red edge are searched.
/// For a factor goal the tracker keeps, per vertex, whether it lies in some
/// red `K_k`; the exact-cover search runs only once every vertex does.
#[derive(Debug, Clone)]
pub struct GoalTracker {
    goal: GoalSpec,
    covered: Vec<bool>,
    uncovered: usize,
    witness: Option<Witness>,
}

impl GoalTracker {
    pub fn new(n: u32, goal: GoalSpec) -> Result<Self, GoalError> {
        goal.validate_for(n)?;
        let track = matches!(goal, GoalSpec::CliqueFactor(_));
        Ok(GoalTracker {
            goal,
            covered: if track { vec![false; n as usize] } else { Vec::new() },
            uncovered: n as usize,
            witness: None,
        })
    }

    /// Builds a tracker for a board that may already have red edges.
    pub fn from_board(board: &Board, goal: GoalSpec) -> Result<Self, GoalError> {
        let mut t = GoalTracker::new(board.n(), goal)?;
        match goal {
            GoalSpec::SingleClique(l) => {
                let mut found = None;
                for_each_clique(board, l as usize, |c| {
                    if found.is_none() {
                        found = Some(c.to_vec());
                    }
                });
                t.witness = found.map(|c| Witness::Clique(c.into_iter().map(Vertex).collect()));
            }
            GoalSpec::CliqueFactor(k) => {
                for_each_clique(board, k as usize, |c| {
                    for &v in c {
                        if !std::mem::replace(&mut t.covered[v as usize], true) {
                            t.uncovered -= 1;
                        }
                    }
                });
                t.try_factor(board);
            }
        }
        Ok(t)
    }

    pub fn goal(&self) -> GoalSpec {
        self.goal
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn is_met(&self) -> bool {
        self.witness.is_some()
    }

    /// Call after `red` has turned red on `board`.
    pub fn observe(&mut self, board: &Board, red: Edge) -> Option<&Witness> {
        if self.witness.is_some() {
            return self.witness.as_ref();
        }
        let size = self.goal.clique_size() as usize;
        let (a, b) = (red.u(), red.v());
        let common = common_neighbors(board, a, b);
        match self.goal {
            GoalSpec::SingleClique(_) => {
                if size == 2 {
                    self.witness = Some(Witness::Clique(vec![Vertex(a), Vertex(b)]));
                } else if let Some(rest) = clique_in(board, &common, size - 2) {
                    let mut c: Vec<u32> = rest;
                    c.extend([a, b]);
                    c.sort_unstable();
                    self.witness = Some(Witness::Clique(c.into_iter().map(Vertex).collect()));
                }
            }
            GoalSpec::CliqueFactor(_) => {
                let mut fresh = Vec::new();
                if size == 2 {
                    fresh.extend([a, b]);
                } else {
                    let sub = induced(board, &common);
                    for_each_clique(&sub.0, size - 2, |c| {
                        fresh.extend(c.iter().map(|&i| sub.1[i as usize]));
                        fresh.extend([a, b]);
                    });
                }
                for v in fresh {
                    if !std::mem::replace(&mut self.covered[v as usize], true) {
                        self.uncovered -= 1;
                    }
                }
                self.try_factor(board);
            }
        }
        self.witness.as_ref()
    }

    fn try_factor(&mut self, board: &Board) {
        if self.uncovered != 0 {
            return;
        }
        if let Ok(Some(w)) = find_red_factor(board, self.goal.clique_size()) {
            self.witness = Some(Witness::Factor(w));
        }
    }
}

fn clique_in(board: &Board, candidates: &[u32], size: usize) -> Option<Vec<u32>> {
    if size == 0 {
        return Some(Vec::new());
    }
    let mut c = candidates.to_vec();
    c.sort_unstable();
    crate::graph::find_clique_in(board, &c, size)
}

/// The red graph induced on `vs`, relabelled `0..vs.len()`, with the map back.
fn induced(board: &Board, vs: &[u32]) -> (RedGraph, Vec<u32>) {
    let mut sorted = vs.to_vec();
    sorted.sort_unstable();
    let mut g = RedGraph::new(sorted.len() as u32);
    for (i, &x) in sorted.iter().enumerate() {
        for (j, &y) in sorted.iter().enumerate().skip(i + 1) {
            if board.is_red(x, y) {
                g.add_edge(i as u32, j as u32);
            }
        }
    }
    (g, sorted)
}

#[derive(Debug, Clone)]
pub struct GameResult {
    pub outcome: Outcome,
    pub stop: StopReason,
    pub rounds: u64,
    pub witness: Option<Witness>,
    pub transcript: Transcript,
    pub board: Board,
}

/// Plays until the goal holds, the board runs out, Waiter stops offering or
/// the round cap is hit.
pub fn play<W, C>(config: &GameConfig, waiter: &mut W, client: &mut C) -> Result<GameResult, GameError>
where
    W: Waiter + ?Sized,
    C: Client + ?Sized,
{
    let mut board = Board::new(config.n)?;
    let mut tracker = GoalTracker::new(config.n, config.goal)?;
    let mut transcript = Transcript::new(config.n, config.goal, config.seed);
    let cap = config.round_cap.unwrap_or(board.capacity());
    let stop = loop {
        if !board.can_continue() {
            break StopReason::BoardExhausted;
        }
        if board.round() >= cap {
            break StopReason::RoundCap;
        }
        let round = board.round() + 1;
        let offer = match waiter.next_offer(&board) {
            Ok(Some(o)) => o,
            Ok(None) => break StopReason::WaiterStopped,
            Err(source) => return Err(GameError::Strategy { round, source }),
        };
        board
            .check_offer(offer)
            .map_err(|source| GameError::IllegalOffer { round, source })?;
        let choice = client
            .choose(&board, offer)
            .map_err(|source| GameError::Strategy { round, source })?;
        if !offer.contains(choice) {
            return Err(GameError::IllegalChoice { round });
        }
        board.apply_round(offer, choice)?;
        transcript.push(offer, choice);
        waiter.observe(offer, choice);
        if tracker.observe(&board, choice).is_some() {
            break StopReason::GoalReached;
        }
    };
    if stop != StopReason::GoalReached && config.lone_edge == LoneEdgePolicy::ToWaiter {
        board.assign_lone_edge_to_waiter();
    }
    let witness = tracker.witness().cloned();
    Ok(GameResult {
        outcome: if witness.is_some() {
            Outcome::WaiterWins
        } else {
            Outcome::ClientSurvives
        },
        stop,
        rounds: board.round(),
        witness,
        transcript,
        board,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{CliqueBuilder, GreedyDegreeWaiter, RandomClient, RandomOfferWaiter, ScriptedClient};

    #[test]
    fn builder_game_is_won_with_witness() {
        let config = GameConfig::new(7, GoalSpec::SingleClique(3));
        let mut w = CliqueBuilder::new(3, (0..7).collect()).unwrap();
        let r = play(&config, &mut w, &mut RandomClient::new(3)).unwrap();
        assert_eq!(r.outcome, Outcome::WaiterWins);
        assert_eq!(r.stop, StopReason::GoalReached);
        assert!(r.rounds <= 4);
        assert!(r.witness.unwrap().verify(&r.board, config.goal));
        assert_eq!(r.transcript.replay().unwrap().round(), r.rounds);
    }

    #[test]
    fn n3_factor_game_survives() {
        let config = GameConfig::new(3, GoalSpec::CliqueFactor(3));
        let r = play(
            &config,
            &mut GreedyDegreeWaiter::new(),
            &mut ScriptedClient::new(vec![true]),
        )
        .unwrap();
        assert_eq!(r.outcome, Outcome::ClientSurvives);
        assert_eq!(r.stop, StopReason::BoardExhausted);
        assert_eq!(r.board.unclaimed_count(), 1);

        let mut config = config;
        config.lone_edge = LoneEdgePolicy::ToWaiter;
        let r = play(
            &config,
            &mut GreedyDegreeWaiter::new(),
            &mut ScriptedClient::new(vec![true]),
        )
        .unwrap();
        assert_eq!(r.board.unclaimed_count(), 0);
        assert_eq!(r.board.blue_count(), 2);
    }

    #[test]
    fn round_cap_stops_early() {
        let mut config = GameConfig::new(10, GoalSpec::CliqueFactor(5));
        config.round_cap = Some(3);
        let r = play(&config, &mut RandomOfferWaiter::new(1), &mut RandomClient::new(1)).unwrap();
        assert_eq!((r.rounds, r.stop), (3, StopReason::RoundCap));
    }

    #[test]
    fn tracker_matches_full_detection() {
        for seed in 0..40 {
            let config = GameConfig::new(6, GoalSpec::CliqueFactor(3));
            let r = play(&config, &mut RandomOfferWaiter::new(seed), &mut RandomClient::new(seed)).unwrap();
            // replaying every prefix: the first prefix with a factor is the end
            let t = &r.transcript;
            let first = (1..=t.len()).find(|&m| find_red_factor(&t.replay_prefix(m).unwrap(), 3).unwrap().is_some());
            match r.outcome {
                Outcome::WaiterWins => assert_eq!(first, Some(t.len())),
                Outcome::ClientSurvives => assert_eq!(first, None),
            }
            let again = GoalTracker::from_board(&r.board, config.goal).unwrap();
            assert_eq!(again.is_met(), r.outcome == Outcome::WaiterWins);
        }
    }

    #[test]
    fn wrong_goal_is_rejected() {
        let config = GameConfig::new(7, GoalSpec::CliqueFactor(3));
        assert!(matches!(
            play(&config, &mut GreedyDegreeWaiter::new(), &mut RandomClient::new(0)),
            Err(GameError::Goal(GoalError::Indivisible { .. }))
        ));
    }
}
