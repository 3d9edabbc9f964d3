//! Waiter and Client strategies and their string identifiers.

mod baseline;
mod clients;
mod clique_builder;
mod factor;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::board::{Board, BoardError, Edge, Offer};
use crate::goal::GoalSpec;

pub use baseline::{GreedyDegreeWaiter, RandomOfferWaiter};
pub use clients::{RandomClient, ScriptedClient};
pub use clique_builder::{builder_rounds, CliqueBuilder};
pub use factor::{plan_is_valid, stage_parameters, FactorWaiter, Stage, StagePlan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("client script ran out at round {round}")]
    ScriptUnderrun { round: u64 },
    #[error("clique builder needs {expected} candidates, got {got}")]
    BadBudget { expected: usize, got: usize },
    #[error("edge {0} between candidates is already claimed")]
    DirtyBoard(Edge),
    #[error("board has {n} vertices, strategy needs at least {need}")]
    BoardTooSmall { n: u64, need: u64 },
    #[error("k = {k} does not divide n = {n}")]
    Indivisible { n: u32, k: u32 },
    #[error("no legal offer remains")]
    GameOver,
    #[error("unknown strategy {0:?}")]
    Unknown(String),
    #[error("strategy {id} cannot play {role}")]
    WrongRole { id: String, role: &'static str },
    #[error("strategy {id} does not fit goal {goal}: {reason}")]
    Mismatch { id: String, goal: GoalSpec, reason: String },
    #[error("bad strategy parameter: {0}")]
    BadParameter(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error(transparent)]
    Board(#[from] BoardError),
}

/// Waiter's side of the game.
pub trait Waiter {
    /// The next offer, or `None` when the strategy has nothing left to offer.
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError>;

    /// Called after each round with Client's choice.
    fn observe(&mut self, _offer: Offer, _choice: Edge) {}
}

/// Client's side of the game.
pub trait Client {
    fn choose(&mut self, board: &Board, offer: Offer) -> Result<Edge, StrategyError>;
}

impl<W: Waiter + ?Sized> Waiter for Box<W> {
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError> {
        (**self).next_offer(board)
    }

    fn observe(&mut self, offer: Offer, choice: Edge) {
        (**self).observe(offer, choice)
    }
}

impl<C: Client + ?Sized> Client for Box<C> {
    fn choose(&mut self, board: &Board, offer: Offer) -> Result<Edge, StrategyError> {
        (**self).choose(board, offer)
    }
}

/// Strategy identifiers as used on the command line and in session configs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StrategyId {
    Random,
    Scripted(Vec<bool>),
    /// Clique size; taken from a `clique:<l>` goal when absent.
    CliqueBuilder(Option<u32>),
    /// Clique size; taken from a `factor:<k>` goal when absent.
    Factor(Option<u32>),
    Greedy,
    SolverOptimal,
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyId::Random => f.write_str("random"),
            StrategyId::Scripted(bits) => {
                f.write_str("scripted:")?;
                for &b in bits {
                    f.write_str(if b { "1" } else { "0" })?;
                }
                Ok(())
            }
            StrategyId::CliqueBuilder(None) => f.write_str("clique_builder"),
            StrategyId::CliqueBuilder(Some(l)) => write!(f, "clique_builder:{l}"),
            StrategyId::Factor(None) => f.write_str("factor"),
            StrategyId::Factor(Some(k)) => write!(f, "factor:{k}"),
            StrategyId::Greedy => f.write_str("greedy"),
            StrategyId::SolverOptimal => f.write_str("solver_optimal"),
        }
    }
}

fn parse_size(id: &str, text: &str) -> Result<u32, StrategyError> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(StrategyError::Unknown(id.to_string()));
    }
    match text.parse::<u32>() {
        Ok(v) if (2..=64).contains(&v) => Ok(v),
        _ => Err(StrategyError::Unknown(id.to_string())),
    }
}

impl FromStr for StrategyId {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, param) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        match (name, param) {
            ("random", None) => Ok(StrategyId::Random),
            ("greedy", None) => Ok(StrategyId::Greedy),
            ("solver_optimal", None) => Ok(StrategyId::SolverOptimal),
            ("clique_builder", None) => Ok(StrategyId::CliqueBuilder(None)),
            ("factor", None) => Ok(StrategyId::Factor(None)),
            ("clique_builder", Some(p)) => Ok(StrategyId::CliqueBuilder(Some(parse_size(s, p)?))),
            ("factor", Some(p)) => Ok(StrategyId::Factor(Some(parse_size(s, p)?))),
            ("scripted", Some(p)) => p
                .chars()
                .map(|c| match c {
                    '1' => Ok(true),
                    '0' => Ok(false),
                    _ => Err(StrategyError::Unknown(s.to_string())),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(StrategyId::Scripted),
            _ => Err(StrategyError::Unknown(s.to_string())),
        }
    }
}

impl StrategyId {
    pub fn is_waiter(&self) -> bool {
        !matches!(self, StrategyId::Scripted(_))
    }

    pub fn is_client(&self) -> bool {
        matches!(self, StrategyId::Random | StrategyId::Scripted(_))
    }
}

pub type BoxedWaiter = Box<dyn Waiter + Send>;
pub type BoxedClient = Box<dyn Client + Send>;

fn mismatch(id: &StrategyId, goal: GoalSpec, reason: impl Into<String>) -> StrategyError {
    StrategyError::Mismatch {
        id: id.to_string(),
        goal,
        reason: reason.into(),
    }
}

/// Builds a Waiter for a game on `K_n` with the given goal. `seed` feeds the
/// randomized baselines.
pub fn make_waiter(id: &StrategyId, n: u32, goal: GoalSpec, seed: u64) -> Result<BoxedWaiter, StrategyError> {
    match id {
        StrategyId::Random => Ok(Box::new(RandomOfferWaiter::new(seed))),
        StrategyId::Greedy => Ok(Box::new(GreedyDegreeWaiter::new())),
        StrategyId::CliqueBuilder(l) => {
            let l = match (l, goal) {
                (Some(l), _) => *l,
                (None, GoalSpec::SingleClique(l)) => l,
                (None, _) => return Err(mismatch(id, goal, "needs a clique size")),
            };
            if let GoalSpec::SingleClique(g) = goal {
                if g > l {
                    return Err(mismatch(id, goal, format!("builds only a K_{l}")));
                }
            }
            let need = builder_candidates(l)?;
            if u64::from(n) < need {
                return Err(StrategyError::BoardTooSmall { n: u64::from(n), need });
            }
            Ok(Box::new(CliqueBuilder::new(l, (0..need as u32).collect())?))
        }
        StrategyId::Factor(k) => {
            let k = match (k, goal) {
                (Some(k), _) => *k,
                (None, GoalSpec::CliqueFactor(k)) => k,
                (None, _) => return Err(mismatch(id, goal, "needs a factor size")),
            };
            Ok(Box::new(FactorWaiter::new(k, n)?))
        }
        StrategyId::SolverOptimal => Ok(Box::new(
            crate::solver::SolverWaiter::new(n, goal).map_err(|e| StrategyError::Solver(e.to_string()))?,
        )),
        StrategyId::Scripted(_) => Err(StrategyError::WrongRole {
            id: id.to_string(),
            role: "waiter",
        }),
    }
}

pub fn make_client(id: &StrategyId, seed: u64) -> Result<BoxedClient, StrategyError> {
    match id {
        StrategyId::Random => Ok(Box::new(RandomClient::new(seed))),
        StrategyId::Scripted(bits) => Ok(Box::new(ScriptedClient::new(bits.clone()))),
        other => Err(StrategyError::WrongRole {
            id: other.to_string(),
            role: "client",
        }),
    }
}

/// `2^l − 1`, or an error when it does not fit the board type.
pub fn builder_candidates(l: u32) -> Result<u64, StrategyError> {
    if !(2..=31).contains(&l) {
        return Err(StrategyError::BadParameter(format!("clique size {l} outside 2..=31")));
    }
    Ok((1u64 << l) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for text in [
            "random",
            "scripted:0110",
            "scripted:",
            "clique_builder:4",
            "clique_builder",
            "factor:3",
            "factor",
            "greedy",
            "solver_optimal",
        ] {
            let id: StrategyId = text.parse().unwrap();
            assert_eq!(id.to_string(), text);
        }
    }

    #[test]
    fn bad_ids() {
        for text in [
            "",
            "Random",
            "random:1",
            "scripted",
            "scripted:012",
            "clique_builder:1",
            "clique_builder:x",
            "factor:",
            "factor:+3",
            "greedy:2",
        ] {
            assert!(text.parse::<StrategyId>().is_err(), "{text}");
        }
    }

    #[test]
    fn roles_are_checked() {
        let g = GoalSpec::SingleClique(3);
        assert!(matches!(
            make_waiter(&StrategyId::Scripted(vec![]), 5, g, 0),
            Err(StrategyError::WrongRole { .. })
        ));
        assert!(make_client(&StrategyId::Greedy, 0).is_err());
        assert!(make_waiter(&StrategyId::CliqueBuilder(None), 31, GoalSpec::SingleClique(5), 0).is_ok());
        assert!(matches!(
            make_waiter(&StrategyId::CliqueBuilder(None), 5, GoalSpec::SingleClique(5), 0),
            Err(StrategyError::BoardTooSmall { n: 5, need: 31 })
        ));
        assert!(make_waiter(&StrategyId::CliqueBuilder(None), 31, GoalSpec::CliqueFactor(3), 0).is_err());
    }
}
