//! Structural and event detectors over finished or partial games.

pub mod degrees;
pub mod encoding;
pub mod events;
pub mod exact_cover;
pub mod factor;
pub mod pairs;
pub mod thresholds;

use thiserror::Error;

pub use degrees::{classify_degrees, DegreeReport};
pub use encoding::{
    check_t, check_t_ordered, check_t_relaxed, decode, encode_history, encode_ordered, EncodingVector, TParams,
};
pub use events::{detect_events, EventParams, EventReport};
pub use factor::{find_factor, find_red_factor, FactorWitness};
pub use pairs::{component_pair_counts, good_pair_counts, CliqueTimes};
pub use thresholds::Variant;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error("k = {k} does not divide n = {n}")]
    Indivisible { n: u32, k: u32 },
    #[error("bad ordering: {0}")]
    BadOrdering(String),
    #[error("not encodable: {0}")]
    NotEncodable(String),
    #[error("vertex {vertex} has {size} candidate neighbours, above the cap of {cap}")]
    NeighborhoodTooLarge { vertex: u32, size: usize, cap: usize },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u32, n: u32 },
}
