//! Edge orderings of `K_k` and the statistics checked over them: exhaustive
//! and sampled pair surveys, the doubling construction, rare/connective edge
//! labels and the union-bound arithmetic.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::detectors::{component_pair_counts, good_pair_counts, CliqueTimes, Variant};
use crate::graph::UnionFind;

/// Largest `k` whose orderings are enumerated exhaustively (`10!` of them).
pub const EXHAUSTIVE_MAX_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LemmaError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("not an ordering of K_{k}: {reason}")]
    NotPermutation { k: usize, reason: String },
    #[error("exhaustive mode supports k ≤ {EXHAUSTIVE_MAX_K}, got {0}")]
    TooLarge(usize),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// A permutation of the edges of the complete graph on `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeOrdering {
    k: usize,
    edges: Vec<(u32, u32)>,
}

fn lex_edges(k: usize) -> Vec<(u32, u32)> {
    let k = k as u32;
    (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect()
}

impl EdgeOrdering {
    /// Each pair is normalised to `(min, max)`; every edge of `K_k` must
    /// appear exactly once.
    pub fn new(k: usize, edges: Vec<(u32, u32)>) -> Result<Self, LemmaError> {
        let bad = |reason: String| LemmaError::NotPermutation { k, reason };
        if k < 2 {
            return Err(bad("need at least two vertices".into()));
        }
        let m = k * (k - 1) / 2;
        if edges.len() != m {
            return Err(bad(format!("{} edges, expected {m}", edges.len())));
        }
        let mut seen = vec![false; k * k];
        let mut out = Vec::with_capacity(m);
        for (a, b) in edges {
            let (a, b) = (a.min(b), a.max(b));
            if a == b || b as usize >= k {
                return Err(bad(format!("edge {a}-{b} is not in K_{k}")));
            }
            if std::mem::replace(&mut seen[a as usize * k + b as usize], true) {
                return Err(bad(format!("edge {a}-{b} repeated")));
            }
            out.push((a, b));
        }
        Ok(EdgeOrdering { k, edges: out })
    }

    /// Reads one edge per line as two vertex ids separated by whitespace,
    /// `-` or `,`. Blank lines and lines starting with `#` are skipped; `k`
    /// is one more than the largest id.
    pub fn parse(text: &str) -> Result<Self, LemmaError> {
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| LemmaError::Parse {
                line: i + 1,
                reason: reason.to_string(),
            };
            let parts: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == '-' || c == ',')
                .filter(|p| !p.is_empty())
                .collect();
            let [a, b] = parts[..] else {
                return Err(err("expected two vertex ids"));
            };
            let a: u32 = a.parse().map_err(|_| err("bad vertex id"))?;
            let b: u32 = b.parse().map_err(|_| err("bad vertex id"))?;
            if a > 4096 || b > 4096 {
                return Err(err("vertex id too large"));
            }
            edges.push((a, b));
        }
        let k = edges.iter().map(|&(a, b)| a.max(b) as usize + 1).max().unwrap_or(0);
        Self::new(k, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.edges.len() * 6);
        for &(a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn times(&self) -> CliqueTimes {
        let order: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
        CliqueTimes::from_order(self.k, &order).expect("validated on construction")
    }

    pub fn good_pairs(&self) -> Vec<usize> {
        good_pair_counts(&self.times())
    }

    pub fn component_pairs(&self) -> Vec<usize> {
        component_pair_counts(&self.times())
    }
}

impl fmt::Display for EdgeOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}{b}")?;
        }
        Ok(())
    }
}

/// A uniformly random ordering from a seeded stream.
pub fn random_ordering(k: usize, seed: u64) -> EdgeOrdering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_ordering_with(k, &mut rng)
}

pub fn random_ordering_with(k: usize, rng: &mut ChaCha8Rng) -> EdgeOrdering {
    let mut edges = lex_edges(k);
    edges.shuffle(rng);
    EdgeOrdering { k, edges }
}

/// Ordering on `2^t` vertices in `t` stages. Stage 0 is the matching
/// `{2i, 2i+1}`; stage `j` joins blocks `2p` and `2p+1` of size `2^j` with
/// every edge between them, in lexicographic order.
pub fn doubling_ordering(t: u32) -> Result<EdgeOrdering, LemmaError> {
    if !(1..=12).contains(&t) {
        return Err(LemmaError::BadParameter(format!("t = {t} outside 1..=12")));
    }
    Ok(EdgeOrdering {
        k: 1 << t,
        edges: doubling_stages(t).into_iter().flatten().collect(),
    })
}

/// The stages of [`doubling_ordering`] separately.
pub fn doubling_stages(t: u32) -> Vec<Vec<(u32, u32)>> {
    let k = 1u32 << t;
    (0..t)
        .map(|j| {
            let size = 1u32 << j;
            let mut stage = Vec::new();
            for p in (0..k).step_by(2 * size as usize) {
                for a in p..p + size {
                    for b in p + size..p + 2 * size {
                        stage.push((a, b));
                    }
                }
            }
            stage.sort_unstable();
            stage
        })
        .collect()
}

/// Which of the two pair statistics a survey uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatistic {
    Good,
    Component,
}

impl PairStatistic {
    fn counts(self, times: &CliqueTimes) -> Vec<usize> {
        match self {
            PairStatistic::Good => good_pair_counts(times),
            PairStatistic::Component => component_pair_counts(times),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyMode {
    Exhaustive,
    Samples { count: u64, seed: u64 },
}

/// Outcome of a survey: over the surveyed orderings, the minimum of the
/// largest per-vertex count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Survey {
    pub k: usize,
    pub statistic: PairStatistic,
    pub mode: SurveyMode,
    pub orderings: u64,
    pub min_of_max: usize,
    /// First ordering (in enumeration order) attaining the minimum.
    pub extremal: EdgeOrdering,
    /// Orderings whose good-pair total differs from `C(k, 3)`.
    pub total_violations: u64,
    /// For good pairs, `⌈(k−1)(k−2)/6⌉`.
    pub bound: Option<usize>,
}

impl Survey {
    /// Whether the minimum meets the bound, when there is one.
    pub fn holds(&self) -> Option<bool> {
        self.bound.map(|b| self.min_of_max >= b && self.total_violations == 0)
    }
}

/// `⌈(k−1)(k−2)/6⌉`.
pub fn good_pair_bound(k: usize) -> usize {
    ((k - 1) * (k - 2)).div_ceil(6)
}

fn binomial3(k: usize) -> usize {
    k * k.saturating_sub(1) * k.saturating_sub(2) / 6
}

/// Heap's algorithm over `items`, calling `f` on every arrangement.
fn for_each_permutation<T: Copy>(items: &mut [T], mut f: impl FnMut(&[T])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone)]
struct Partial {
    orderings: u64,
    min_of_max: usize,
    extremal: Vec<(u32, u32)>,
    total_violations: u64,
}

impl Partial {
    fn empty() -> Self {
        Partial {
            orderings: 0,
            min_of_max: usize::MAX,
            extremal: Vec::new(),
            total_violations: 0,
        }
    }

    fn record(&mut self, k: usize, stat: PairStatistic, edges: &[(u32, u32)]) {
        let order: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
        let times = CliqueTimes::from_order(k, &order).expect("permutation");
        let counts = stat.counts(&times);
        if stat == PairStatistic::Good && counts.iter().sum::<usize>() != binomial3(k) {
            self.total_violations += 1;
        }
        let max = counts.into_iter().max().unwrap_or(0);
        self.orderings += 1;
        if max < self.min_of_max {
            self.min_of_max = max;
            self.extremal = edges.to_vec();
        }
    }

    /// Folds `later` in; ties keep the earlier extremal ordering.
    fn merge(mut self, later: Partial) -> Self {
        self.orderings += later.orderings;
        self.total_violations += later.total_violations;
        if later.min_of_max < self.min_of_max {
            self.min_of_max = later.min_of_max;
            self.extremal = later.extremal;
        }
        self
    }
}

/// Surveys `statistic` over all orderings of `K_k` or a seeded sample.
/// Exhaustive work is split by first edge; the reduction runs in that
/// order, so the result does not depend on the worker count.
pub fn survey(k: usize, statistic: PairStatistic, mode: SurveyMode) -> Result<Survey, LemmaError> {
    if k < 3 {
        return Err(LemmaError::BadParameter(format!("k = {k} below 3")));
    }
    let partial = match mode {
        SurveyMode::Exhaustive => {
            if k > EXHAUSTIVE_MAX_K {
                return Err(LemmaError::TooLarge(k));
            }
            let all = lex_edges(k);
            let parts: Vec<Partial> = (0..all.len())
                .into_par_iter()
                .map(|first| {
                    let mut rest: Vec<(u32, u32)> = all
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != first)
                        .map(|(_, &e)| e)
                        .collect();
                    let mut p = Partial::empty();
                    let mut buf = Vec::with_capacity(all.len());
                    for_each_permutation(&mut rest, |perm| {
                        buf.clear();
                        buf.push(all[first]);
                        buf.extend_from_slice(perm);
                        p.record(k, statistic, &buf);
                    });
                    p
                })
                .collect();
            parts.into_iter().fold(Partial::empty(), Partial::merge)
        }
        SurveyMode::Samples { count, seed } => {
            if count == 0 {
                return Err(LemmaError::BadParameter("zero samples".into()));
            }
            let chunk = 4096u64;
            let chunks = count.div_ceil(chunk);
            let parts: Vec<Partial> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut p = Partial::empty();
                    for i in c * chunk..((c + 1) * chunk).min(count) {
                        let o = random_ordering(k, sample_seed(seed, i));
                        p.record(k, statistic, &o.edges);
                    }
                    p
                })
                .collect();
            parts.into_iter().fold(Partial::empty(), Partial::merge)
        }
    };
    Ok(Survey {
        k,
        statistic,
        mode,
        orderings: partial.orderings,
        min_of_max: partial.min_of_max,
        extremal: EdgeOrdering {
            k,
            edges: partial.extremal,
        },
        total_violations: partial.total_violations,
        bound: (statistic == PairStatistic::Good).then(|| good_pair_bound(k)),
    })
}

/// Seed of the `i`-th sampled ordering.
pub fn sample_seed(seed: u64, i: u64) -> u64 {
    // splitmix64 finaliser over the pair
    let mut z = seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Good-pair survey; exhaustive for `k ≤ 5`.
pub fn verify_good_pair_lemma(k: usize, mode: SurveyMode) -> Result<Survey, LemmaError> {
    survey(k, PairStatistic::Good, mode)
}

/// Component-pair survey. No bound is asserted.
pub fn survey_component_pair_lemma(k: usize, mode: SurveyMode) -> Result<Survey, LemmaError> {
    survey(k, PairStatistic::Component, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeLabel {
    Rare,
    Connective,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RareThresholds {
    /// An edge is rare if it is among the first `rare_count` edges at
    /// either endpoint.
    pub rare_count: usize,
    /// An edge is connective at `z` if it joins `z`'s component to a
    /// different component of at least this many vertices.
    pub component_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeLabels {
    /// Parallel to the ordering's edges.
    pub labels: Vec<EdgeLabel>,
    /// Per vertex, edges at it that were connective at it (rare edges
    /// included).
    pub connective_at: Vec<usize>,
    pub rare: usize,
    pub connective: usize,
}

/// Labels each edge by replaying the ordering. Rare wins over connective.
pub fn classify_rare_connective(ordering: &EdgeOrdering, th: RareThresholds) -> EdgeLabels {
    let k = ordering.k;
    let mut degree = vec![0usize; k];
    let mut uf = UnionFind::new(k);
    let mut connective_at = vec![0usize; k];
    let mut labels = Vec::with_capacity(ordering.edges.len());
    for &(a, b) in &ordering.edges {
        let (a, b) = (a as usize, b as usize);
        let rare = degree[a] < th.rare_count || degree[b] < th.rare_count;
        degree[a] += 1;
        degree[b] += 1;
        let mut connective = false;
        if !uf.same(a, b) {
            let (sa, sb) = (uf.set_size(a), uf.set_size(b));
            if sb >= th.component_size {
                connective_at[a] += 1;
                connective = true;
            }
            if sa >= th.component_size {
                connective_at[b] += 1;
                connective = true;
            }
            uf.union(a, b);
        }
        labels.push(if rare {
            EdgeLabel::Rare
        } else if connective {
            EdgeLabel::Connective
        } else {
            EdgeLabel::Plain
        });
    }
    EdgeLabels {
        rare: labels.iter().filter(|&&l| l == EdgeLabel::Rare).count(),
        connective: labels.iter().filter(|&&l| l == EdgeLabel::Connective).count(),
        labels,
        connective_at,
    }
}

/// The union bound `|index set| · per-event bound`, all in `log2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub k: f64,
    pub variant: Variant,
    pub log2_degree_threshold: f64,
    /// The floored threshold, when it fits an `f64`.
    pub degree_threshold: Option<f64>,
    pub log2_index_set: f64,
    pub log2_event_bound: f64,
    pub log2_union_bound: f64,
    /// `log2(1/(4k))`.
    pub log2_target: f64,
    pub below_target: bool,
}

fn log2_factorial(m: f64) -> f64 {
    ln_gamma(m + 1.0) / std::f64::consts::LN_2
}

/// `log2 C(d, r)` for `d = ⌊2^x⌋`. Once `d` no longer fits exactly the
/// product form is `r·x − log2 r!` up to a relative error below `r/d`.
fn log2_binomial_floor_pow2(x: f64, r: f64) -> f64 {
    if x > 60.0 {
        return r * x - log2_factorial(r);
    }
    let d = x.exp2().floor();
    if d < r {
        return f64::NEG_INFINITY;
    }
    let mut s = 0.0;
    let mut i = 0.0;
    while i < r {
        s += (d - i).log2();
        i += 1.0;
    }
    s - log2_factorial(r)
}

/// Evaluates the union bound for one event family. `|Y| = C(D, k−1)` with
/// per-event bound `2^{−k²/6 + k}`; `|Z| = D^{k−1}·(k−1)!` with per-event
/// bound `2^{−k²/3 + k²/(log k)²}`. `D` is the floored degree threshold.
pub fn union_bound_value(k: f64, variant: Variant) -> Result<BoundReport, LemmaError> {
    if !k.is_finite() || k < 4.0 {
        return Err(LemmaError::BadParameter(format!("k = {k} below 4")));
    }
    let x = variant.log2_degree_threshold(k);
    let degree_threshold = (x <= 1000.0).then(|| x.exp2().floor());
    let (log2_index_set, log2_event_bound) = match variant {
        Variant::S2 => (log2_binomial_floor_pow2(x, k - 1.0), -k * k / 6.0 + k),
        Variant::S3 => {
            let log2_d = match degree_threshold {
                Some(d) if d >= 1.0 => d.log2(),
                Some(_) => f64::NEG_INFINITY,
                None => x,
            };
            let l = k.log2();
            (
                (k - 1.0) * log2_d + log2_factorial(k - 1.0),
                -k * k / 3.0 + k * k / (l * l),
            )
        }
    };
    let log2_union_bound = log2_index_set + log2_event_bound;
    let log2_target = -(4.0 * k).log2();
    Ok(BoundReport {
        k,
        variant,
        log2_degree_threshold: x,
        degree_threshold,
        log2_index_set,
        log2_event_bound,
        log2_union_bound,
        log2_target,
        below_target: log2_union_bound < log2_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let o = EdgeOrdering::parse("0 1\n# c\n\n0-2\n1,2\n").unwrap();
        assert_eq!(o.k(), 3);
        assert_eq!(o.to_string(), "01 02 12");
        assert_eq!(EdgeOrdering::parse(&o.to_text()).unwrap(), o);
        assert!(EdgeOrdering::parse("0 1\n0 1\n1 2\n").is_err());
        assert!(EdgeOrdering::parse("0 1\n").is_ok());
        assert!(EdgeOrdering::parse("0 1\n0 2\n").is_err());
        assert!(EdgeOrdering::parse("0 x\n").is_err());
        assert!(EdgeOrdering::parse("0 0\n").is_err());
        assert!(EdgeOrdering::parse("").is_err());
    }

    #[test]
    fn doubling_t2() {
        let o = doubling_ordering(2).unwrap();
        assert_eq!(o.to_string(), "01 23 02 03 12 13");
        assert_eq!(o.component_pairs(), vec![3, 3, 3, 3]);
        assert!(doubling_ordering(0).is_err());
    }

    #[test]
    fn heap_visits_every_permutation_once() {
        let mut items = [0u8, 1, 2, 3];
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(&mut items, |p| {
            assert!(seen.insert(p.to_vec()));
        });
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn small_surveys() {
        let s = verify_good_pair_lemma(3, SurveyMode::Exhaustive).unwrap();
        assert_eq!((s.orderings, s.min_of_max, s.holds()), (6, 1, Some(true)));
        let s = verify_good_pair_lemma(4, SurveyMode::Exhaustive).unwrap();
        assert_eq!(s.orderings, 720);
        assert!(s.min_of_max >= 1);
        assert!(matches!(
            verify_good_pair_lemma(6, SurveyMode::Exhaustive),
            Err(LemmaError::TooLarge(6))
        ));
        let a = survey_component_pair_lemma(6, SurveyMode::Samples { count: 500, seed: 3 }).unwrap();
        let b = survey_component_pair_lemma(6, SurveyMode::Samples { count: 500, seed: 3 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.bound, None);
    }

    #[test]
    fn rare_labels_on_matching() {
        let o = doubling_ordering(3).unwrap();
        let l = classify_rare_connective(
            &o,
            RareThresholds {
                rare_count: 1,
                component_size: 2,
            },
        );
        assert!(l.labels[..4].iter().all(|&x| x == EdgeLabel::Rare));
        assert!(l.rare <= 8);
    }

    #[test]
    fn bounds_small_k() {
        let r = union_bound_value(100.0, Variant::S2).unwrap();
        assert!(r.below_target, "{r:?}");
        assert!(union_bound_value(3.0, Variant::S2).is_err());
        assert!(union_bound_value(f64::NAN, Variant::S2).is_err());
    }
}
