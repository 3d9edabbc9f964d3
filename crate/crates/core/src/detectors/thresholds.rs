//! The degree and pair thresholds of the two event families, as plain
//! evaluators. Logarithms are base 2.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which event family: good pairs with unrestricted neighbours (`S2`) or
/// component pairs with low-degree neighbours only (`S3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    S2,
    S3,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::S2 => "s2",
            Variant::S3 => "s3",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "s2" => Ok(Variant::S2),
            "s3" => Ok(Variant::S3),
            other => Err(format!("unknown variant {other:?}, expected s2 or s3")),
        }
    }
}

impl Variant {
    /// Coefficient `c` in the exponent `c·k` of the degree threshold.
    fn degree_coefficient(self) -> f64 {
        match self {
            Variant::S2 => 1.0 / 6.0,
            Variant::S3 => 1.0 / 3.0,
        }
    }

    /// `log2` of the high-degree threshold, `c·k − k/(2 log k)`.
    pub fn log2_degree_threshold(self, k: f64) -> f64 {
        self.degree_coefficient() * k - k / (2.0 * k.log2())
    }

    /// `log2` of the round budget, `c·k − k/log k` (times `n`).
    pub fn log2_round_factor(self, k: f64) -> f64 {
        self.degree_coefficient() * k - k / k.log2()
    }

    /// Degree threshold rounded down to an integer.
    pub fn degree_threshold(self, k: f64) -> f64 {
        self.log2_degree_threshold(k).exp2().floor()
    }

    /// Minimum counted pairs at `v` for the event.
    pub fn pair_threshold(self, k: f64) -> f64 {
        match self {
            Variant::S2 => (k - 1.0) * (k - 2.0) / 6.0,
            Variant::S3 => {
                let l = k.log2();
                k * k / 3.0 - k * k / (l * l)
            }
        }
    }
}

/// `C(k−1, 2)`, the most pairs any vertex of a `K_k` can be credited with.
pub fn max_pairs(k: u32) -> u64 {
    let m = u64::from(k.saturating_sub(1));
    m * m.saturating_sub(1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_at_small_k_are_below_k() {
        // at desk scale the formula thresholds are tiny, hence parameters
        assert!(Variant::S3.degree_threshold(12.0) < 12.0);
        assert_eq!(Variant::S2.degree_threshold(12.0), 1.0);
        assert_eq!(Variant::S2.pair_threshold(5.0), 2.0);
    }

    #[test]
    fn round_budget_is_below_degree_threshold() {
        for k in [100.0, 1e4, 1e8] {
            for v in [Variant::S2, Variant::S3] {
                assert!(v.log2_round_factor(k) < v.log2_degree_threshold(k));
            }
        }
    }

    #[test]
    fn variant_round_trips() {
        for v in [Variant::S2, Variant::S3] {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert!("s4".parse::<Variant>().is_err());
        assert_eq!(max_pairs(4), 3);
    }
}
