//! Replayable game records and their on-disk text format.
//!
//! A transcript is one JSON document:
//!
//! ```text
//! {"version":1,"n":5,"goal":"clique:3","seed":7,"moves":[{"offer":[0,1],"client":0}]}
//! ```
//!
//! Edges are canonical indices. [`Transcript::to_text`] always produces the
//! same bytes for the same transcript, so `to_text(parse(to_text(t)))` is
//! bit-identical to `to_text(t)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{edge_count, Board, BoardError, Edge, Offer, MAX_VERTICES};
use crate::goal::GoalSpec;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("malformed transcript: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported transcript version {0}")]
    Version(u32),
    #[error("move {index}: {source}")]
    Replay {
        index: usize,
        #[source]
        source: BoardError,
    },
    #[error(transparent)]
    Board(#[from] BoardError),
}

/// One round: what Waiter offered and what Client kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub offer: Offer,
    pub choice: Edge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub n: u32,
    pub goal: GoalSpec,
    pub seed: Option<u64>,
    pub moves: Vec<Move>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireMove {
    offer: [u64; 2],
    client: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTranscript {
    version: u32,
    n: u32,
    goal: GoalSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    moves: Vec<WireMove>,
}

impl Transcript {
    pub fn new(n: u32, goal: GoalSpec, seed: Option<u64>) -> Self {
        Transcript {
            n,
            goal,
            seed,
            moves: Vec::new(),
        }
    }

    pub fn push(&mut self, offer: Offer, choice: Edge) {
        self.moves.push(Move { offer, choice });
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Applies every move to a fresh board, stopping at the first illegal one.
    pub fn replay(&self) -> Result<Board, TranscriptError> {
        self.replay_prefix(self.moves.len())
    }

    pub fn replay_prefix(&self, len: usize) -> Result<Board, TranscriptError> {
        let mut board = Board::new(self.n)?;
        for (index, m) in self.moves.iter().take(len).enumerate() {
            board
                .apply_round(m.offer, m.choice)
                .map_err(|source| TranscriptError::Replay { index, source })?;
        }
        Ok(board)
    }

    pub fn to_text(&self) -> String {
        let wire = WireTranscript {
            version: FORMAT_VERSION,
            n: self.n,
            goal: self.goal,
            seed: self.seed,
            moves: self
                .moves
                .iter()
                .map(|m| WireMove {
                    offer: [m.offer.first().index(), m.offer.second().index()],
                    client: m.choice.index(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string(&wire).expect("transcript serializes");
        text.push('\n');
        text
    }

    /// Parses the text format. Edge indices are range-checked against `n`,
    /// but move legality is left to [`Transcript::replay`].
    pub fn parse(text: &str) -> Result<Self, TranscriptError> {
        let wire: WireTranscript = serde_json::from_str(text)?;
        if wire.version != FORMAT_VERSION {
            return Err(TranscriptError::Version(wire.version));
        }
        if !(2..=MAX_VERTICES).contains(&wire.n) {
            return Err(BoardError::InvalidSize(u64::from(wire.n)).into());
        }
        let total = edge_count(wire.n);
        let edge = |index: u64| {
            if index >= total {
                return Err(BoardError::EdgeIndexOutOfRange { index, n: wire.n });
            }
            Ok(Edge::from_index(index))
        };
        let mut moves = Vec::with_capacity(wire.moves.len());
        for (index, m) in wire.moves.iter().enumerate() {
            let at = |source| TranscriptError::Replay { index, source };
            let first = edge(m.offer[0]).map_err(at)?;
            let second = edge(m.offer[1]).map_err(at)?;
            let choice = edge(m.client).map_err(at)?;
            let offer = Offer::new(first, second).map_err(at)?;
            if !offer.contains(choice) {
                return Err(at(BoardError::IllegalChoice { offer, choice }));
            }
            moves.push(Move { offer, choice });
        }
        Ok(Transcript {
            n: wire.n,
            goal: wire.goal,
            seed: wire.seed,
            moves,
        })
    }
}
