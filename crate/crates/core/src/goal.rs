use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoalError {
    #[error("unrecognized goal {0:?}: expected factor:<k> or clique:<l>")]
    Syntax(String),
    #[error("goal size must be at least 2, got {0}")]
    TooSmall(u32),
    #[error("n = {n} is not divisible by k = {k}")]
    Indivisible { n: u32, k: u32 },
    #[error("goal needs {need} vertices but the board has {n}")]
    TooFewVertices { need: u32, n: u32 },
}

/// What Waiter is trying to force into Client's red graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoalSpec {
    /// A red `K_l` anywhere.
    SingleClique(u32),
    /// A red `K_k`-factor covering every vertex.
    CliqueFactor(u32),
}

impl GoalSpec {
    /// The clique size the goal is built from.
    pub fn clique_size(self) -> u32 {
        match self {
            GoalSpec::SingleClique(l) => l,
            GoalSpec::CliqueFactor(k) => k,
        }
    }

    /// Checks the goal makes sense on `K_n`.
    pub fn validate_for(self, n: u32) -> Result<(), GoalError> {
        let size = self.clique_size();
        if size < 2 {
            return Err(GoalError::TooSmall(size));
        }
        if let GoalSpec::CliqueFactor(k) = self {
            if !n.is_multiple_of(k) {
                return Err(GoalError::Indivisible { n, k });
            }
        }
        if size > n {
            return Err(GoalError::TooFewVertices { need: size, n });
        }
        Ok(())
    }
}

impl fmt::Display for GoalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalSpec::SingleClique(l) => write!(f, "clique:{l}"),
            GoalSpec::CliqueFactor(k) => write!(f, "factor:{k}"),
        }
    }
}

impl FromStr for GoalSpec {
    type Err = GoalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || GoalError::Syntax(s.to_string());
        let (kind, size) = s.split_once(':').ok_or_else(syntax)?;
        if size.is_empty() || !size.bytes().all(|b| b.is_ascii_digit()) {
            return Err(syntax());
        }
        let size: u32 = size.parse().map_err(|_| syntax())?;
        if size < 2 {
            return Err(GoalError::TooSmall(size));
        }
        match kind {
            "clique" => Ok(GoalSpec::SingleClique(size)),
            "factor" => Ok(GoalSpec::CliqueFactor(size)),
            _ => Err(syntax()),
        }
    }
}

impl Serialize for GoalSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GoalSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("factor:3".parse(), Ok(GoalSpec::CliqueFactor(3)));
        assert_eq!("clique:5".parse(), Ok(GoalSpec::SingleClique(5)));
        assert_eq!(GoalSpec::CliqueFactor(4).to_string(), "factor:4");
        for bad in ["", "factor", "factor:", "clique:x", "clique:+3", "tri:3", "factor:3:1"] {
            assert!(bad.parse::<GoalSpec>().is_err(), "{bad}");
        }
        assert_eq!("clique:1".parse::<GoalSpec>(), Err(GoalError::TooSmall(1)));
    }

    #[test]
    fn divisibility() {
        assert_eq!(
            GoalSpec::CliqueFactor(4).validate_for(3),
            Err(GoalError::Indivisible { n: 3, k: 4 })
        );
        assert_eq!(
            GoalSpec::SingleClique(4).validate_for(3),
            Err(GoalError::TooFewVertices { need: 4, n: 3 })
        );
        assert_eq!(
            GoalSpec::CliqueFactor(4).validate_for(6),
            Err(GoalError::Indivisible { n: 6, k: 4 })
        );
        assert!(GoalSpec::CliqueFactor(3).validate_for(6).is_ok());
        assert!(GoalSpec::SingleClique(3).validate_for(5).is_ok());
    }
}
