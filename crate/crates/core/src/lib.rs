//! Waiter-Client clique and clique-factor games on `K_n`: board, strategies,
//! exact solver, detectors, lemma checks and Monte Carlo harness.

pub mod board;
pub mod detectors;
pub mod game;
pub mod goal;
pub mod graph;
pub mod lemma;
pub mod sim;
pub mod solver;
pub mod strategy;
pub mod transcript;

pub use board::{Board, BoardError, Edge, EdgeColor, Offer, Vertex};
pub use goal::{GoalError, GoalSpec};
pub use transcript::{Move, Transcript, TranscriptError};
