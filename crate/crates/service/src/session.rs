//! One live game: a human Client against an algorithmic Waiter.

use serde::{Deserialize, Serialize};

use cliquefactor::game::{GoalTracker, Outcome, StopReason, Witness};
use cliquefactor::strategy::{make_waiter, BoxedWaiter, StrategyId};
use cliquefactor::{Board, Edge, EdgeColor, GoalSpec, Offer, Transcript};

use crate::ServiceError;

/// Largest board the `solver_optimal` Waiter accepts in a live session.
pub const SOLVER_SESSION_MAX_N: u32 = 6;

/// The document posted to `POST /sessions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub n: u32,
    pub goal: GoalSpec,
    pub waiter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SessionConfig {
    pub fn parse(text: &str) -> Result<Self, ServiceError> {
        serde_json::from_str(text).map_err(|e| ServiceError::BadRequest(e.to_string()))
    }

    pub fn waiter_id(&self) -> Result<StrategyId, ServiceError> {
        let id: StrategyId = self
            .waiter
            .parse()
            .map_err(|e: cliquefactor::strategy::StrategyError| ServiceError::BadRequest(e.to_string()))?;
        if !id.is_waiter() {
            return Err(ServiceError::BadRequest(format!("{} cannot play waiter", self.waiter)));
        }
        Ok(id)
    }
}

/// An edge as sent by a client: canonical index or endpoint pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeRef {
    Index(u64),
    Pair([u32; 2]),
}

impl EdgeRef {
    pub fn resolve(self, board: &Board) -> Result<Edge, ServiceError> {
        let e = match self {
            EdgeRef::Index(i) => board.edge_from_index(i),
            EdgeRef::Pair([a, b]) => board.edge(a, b),
        };
        e.map_err(|e| ServiceError::Conflict(e.to_string()))
    }
}

/// Body of `POST /sessions/{id}/choice`. `round`, when given, must be the
/// round currently on offer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceRequest {
    pub edge: EdgeRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round: Option<u64>,
}

impl ChoiceRequest {
    pub fn parse(text: &str) -> Result<Self, ServiceError> {
        serde_json::from_str(text).map_err(|e| ServiceError::BadRequest(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultView {
    pub outcome: Outcome,
    pub stop: StopReason,
    pub rounds: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessView {
    pub kind: &'static str,
    pub blocks: Vec<Vec<u32>>,
}

impl From<&Witness> for WitnessView {
    fn from(w: &Witness) -> Self {
        WitnessView {
            kind: match w {
                Witness::Clique(_) => "clique",
                Witness::Factor(_) => "factor",
            },
            blocks: w.blocks(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlayedRound {
    pub round: u64,
    pub red: u64,
    pub blue: u64,
}

/// Where the session stands: an offer awaiting Client, or the end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progress {
    /// Rounds played so far.
    pub rounds: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last: Option<PlayedRound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offer: Option<[u64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<ResultView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeView {
    pub edge: u64,
    pub color: EdgeColor,
    pub round: u64,
}

/// Full view returned by `GET /sessions/{id}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub n: u32,
    pub goal: GoalSpec,
    pub waiter: String,
    pub seed: u64,
    pub created: u64,
    pub rounds: u64,
    pub edges: Vec<EdgeView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offer: Option<[u64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<ResultView>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Phase {
    Offer(Offer),
    Over(ResultView),
}

pub struct Session {
    id: String,
    config: SessionConfig,
    seed: u64,
    created: u64,
    board: Board,
    tracker: GoalTracker,
    waiter: BoxedWaiter,
    transcript: Transcript,
    last: Option<PlayedRound>,
    phase: Phase,
}

fn offer_indices(o: Offer) -> [u64; 2] {
    [o.first().index(), o.second().index()]
}

impl Session {
    /// Validates `config` and computes Waiter's first offer. `seed` replaces
    /// a missing config seed.
    pub fn start(id: String, config: SessionConfig, seed: u64, created: u64) -> Result<Self, ServiceError> {
        let id_parsed = config.waiter_id()?;
        let bad = |e: String| ServiceError::BadRequest(e);
        config.goal.validate_for(config.n).map_err(|e| bad(e.to_string()))?;
        if id_parsed == StrategyId::SolverOptimal && config.n > SOLVER_SESSION_MAX_N {
            return Err(bad(format!(
                "solver_optimal plays live sessions only up to n = {SOLVER_SESSION_MAX_N}"
            )));
        }
        let seed = config.seed.unwrap_or(seed);
        let board = Board::new(config.n).map_err(|e| bad(e.to_string()))?;
        let tracker = GoalTracker::new(config.n, config.goal).map_err(|e| bad(e.to_string()))?;
        let waiter = make_waiter(&id_parsed, config.n, config.goal, seed).map_err(|e| bad(e.to_string()))?;
        let transcript = Transcript::new(config.n, config.goal, Some(seed));
        let mut s = Session {
            id,
            config,
            seed,
            created,
            board,
            tracker,
            waiter,
            transcript,
            last: None,
            phase: Phase::Over(ResultView {
                outcome: Outcome::ClientSurvives,
                stop: StopReason::BoardExhausted,
                rounds: 0,
                witness: None,
            }),
        };
        s.advance()?;
        Ok(s)
    }

    /// Rebuilds a session from its transcript, checking that Waiter still
    /// makes every recorded offer.
    pub fn restore(
        id: String,
        config: SessionConfig,
        created: u64,
        transcript: &Transcript,
    ) -> Result<Self, ServiceError> {
        let corrupt = |m: String| ServiceError::Corrupt {
            id: id.clone(),
            reason: m,
        };
        let seed = transcript
            .seed
            .ok_or_else(|| corrupt("transcript has no seed".into()))?;
        if transcript.n != config.n || transcript.goal != config.goal {
            return Err(corrupt("transcript does not match session config".into()));
        }
        let mut s = Session::start(id.clone(), config, seed, created).map_err(|e| corrupt(e.to_string()))?;
        for (i, m) in transcript.moves.iter().enumerate() {
            match s.phase {
                Phase::Offer(o) if o == m.offer => {}
                _ => return Err(corrupt(format!("move {i}: waiter no longer makes this offer"))),
            }
            s.apply(m.choice).map_err(|e| corrupt(format!("move {i}: {e}")))?;
        }
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn created(&self) -> u64 {
        self.created
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn is_over(&self) -> bool {
        matches!(self.phase, Phase::Over(_))
    }

    pub fn pending_offer(&self) -> Option<Offer> {
        match self.phase {
            Phase::Offer(o) => Some(o),
            Phase::Over(_) => None,
        }
    }

    pub fn progress(&self) -> Progress {
        let (offer, result) = match &self.phase {
            Phase::Offer(o) => (Some(offer_indices(*o)), None),
            Phase::Over(r) => (None, Some(r.clone())),
        };
        Progress {
            rounds: self.board.round(),
            last: self.last,
            offer,
            result,
        }
    }

    pub fn view(&self) -> SessionView {
        let p = self.progress();
        SessionView {
            id: self.id.clone(),
            n: self.config.n,
            goal: self.config.goal,
            waiter: self.config.waiter.clone(),
            seed: self.seed,
            created: self.created,
            rounds: p.rounds,
            edges: self
                .board
                .claimed_edges()
                .into_iter()
                .map(|(e, c)| EdgeView {
                    edge: e.index(),
                    color: c.color,
                    round: c.round,
                })
                .collect(),
            offer: p.offer,
            result: p.result,
        }
    }

    /// Checks a submitted choice without changing anything.
    pub fn check_choice(&self, req: &ChoiceRequest) -> Result<(Offer, Edge), ServiceError> {
        let offer = match self.phase {
            Phase::Offer(o) => o,
            Phase::Over(_) => return Err(ServiceError::Conflict("game is over".into())),
        };
        let current = self.board.round() + 1;
        if let Some(r) = req.round {
            if r != current {
                return Err(ServiceError::Conflict(format!(
                    "stale choice for round {r}, round {current} is on offer"
                )));
            }
        }
        let edge = req.edge.resolve(&self.board)?;
        if !offer.contains(edge) {
            return Err(ServiceError::Conflict(format!("edge {} is not offered", edge.index())));
        }
        Ok((offer, edge))
    }

    /// The transcript as it will read once `choice` is applied.
    pub fn transcript_with(&self, offer: Offer, choice: Edge) -> Transcript {
        let mut t = self.transcript.clone();
        t.push(offer, choice);
        t
    }

    /// Plays Client's `choice` against the pending offer and lets Waiter move.
    pub fn apply(&mut self, choice: Edge) -> Result<Progress, ServiceError> {
        let req = ChoiceRequest {
            edge: EdgeRef::Index(choice.index()),
            round: None,
        };
        let (offer, edge) = self.check_choice(&req)?;
        self.board
            .apply_round(offer, edge)
            .map_err(|e| ServiceError::Conflict(e.to_string()))?;
        self.transcript.push(offer, edge);
        self.waiter.observe(offer, edge);
        let blue = offer.other(edge).expect("choice is in offer");
        self.last = Some(PlayedRound {
            round: self.board.round(),
            red: edge.index(),
            blue: blue.index(),
        });
        self.tracker.observe(&self.board, edge);
        self.advance()?;
        Ok(self.progress())
    }

    fn finish(&mut self, outcome: Outcome, stop: StopReason) {
        self.phase = Phase::Over(ResultView {
            outcome,
            stop,
            rounds: self.board.round(),
            witness: self.tracker.witness().map(WitnessView::from),
        });
    }

    fn advance(&mut self) -> Result<(), ServiceError> {
        if self.tracker.is_met() {
            self.finish(Outcome::WaiterWins, StopReason::GoalReached);
            return Ok(());
        }
        if !self.board.can_continue() {
            self.finish(Outcome::ClientSurvives, StopReason::BoardExhausted);
            return Ok(());
        }
        let next = self
            .waiter
            .next_offer(&self.board)
            .map_err(|e| ServiceError::Internal(format!("waiter failed: {e}")))?;
        match next {
            Some(o) => {
                self.board
                    .check_offer(o)
                    .map_err(|e| ServiceError::Internal(format!("waiter offered an illegal pair: {e}")))?;
                self.phase = Phase::Offer(o);
            }
            None => self.finish(Outcome::ClientSurvives, StopReason::WaiterStopped),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: u32, goal: &str, waiter: &str) -> SessionConfig {
        SessionConfig {
            n,
            goal: goal.parse().unwrap(),
            waiter: waiter.into(),
            seed: Some(3),
        }
    }

    #[test]
    fn config_errors_are_bad_requests() {
        for c in [
            config(5, "clique:5", "clique_builder"),
            config(7, "factor:3", "solver_optimal"),
            config(5, "factor:3", "greedy"),
            config(5, "clique:3", "scripted:01"),
            config(5, "clique:3", "nope"),
        ] {
            assert!(matches!(
                Session::start("s".into(), c, 0, 0),
                Err(ServiceError::BadRequest(_))
            ));
        }
    }

    #[test]
    fn edge_refs_parse_both_forms() {
        let a = ChoiceRequest::parse(r#"{"edge":4}"#).unwrap();
        let b = ChoiceRequest::parse(r#"{"edge":[1,3],"round":2}"#).unwrap();
        assert_eq!(a.edge, EdgeRef::Index(4));
        assert_eq!(b.edge, EdgeRef::Pair([1, 3]));
        assert_eq!(b.round, Some(2));
        assert!(ChoiceRequest::parse(r#"{"edge":"x"}"#).is_err());
        assert!(ChoiceRequest::parse(r#"{"edge":[1,2,3]}"#).is_err());
    }

    #[test]
    fn builder_session_ends_with_clique() {
        let mut s = Session::start("s".into(), config(7, "clique:3", "clique_builder"), 0, 0).unwrap();
        while let Some(o) = s.pending_offer() {
            s.apply(o.second()).unwrap();
        }
        let p = s.progress();
        let r = p.result.unwrap();
        assert_eq!(r.outcome, Outcome::WaiterWins);
        assert_eq!(r.rounds, 4);
        assert_eq!(r.witness.unwrap().blocks[0].len(), 3);
        assert_eq!(s.view().edges.len(), 8);
    }

    #[test]
    fn wrong_edge_leaves_state_alone() {
        let mut s = Session::start("s".into(), config(7, "clique:3", "random"), 0, 0).unwrap();
        let o = s.pending_offer().unwrap();
        let outside = s.board().unclaimed_edges().find(|e| !o.contains(*e)).unwrap();
        let before = s.view();
        assert!(matches!(s.apply(outside), Err(ServiceError::Conflict(_))));
        assert_eq!(s.view(), before);
    }
}
