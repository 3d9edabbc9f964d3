//! Seeded Monte Carlo over many games, plus the event-frequency estimators.
//!
//! Game `i` draws its Waiter and Client seeds from ChaCha8 streams
//! `4i` and `4i + 1` of the master seed, so results do not depend on how the
//! games are scheduled across workers.

use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::board::{Board, Edge, Offer};
use crate::detectors::{check_t_ordered, detect_events, DetectError, EventParams, TParams};
use crate::game::{play, GameConfig, GameError, LoneEdgePolicy, Outcome, StopReason};
use crate::goal::GoalSpec;
use crate::lemma::good_pair_bound;
use crate::strategy::{make_client, make_waiter, CliqueBuilder, RandomClient, StrategyError, StrategyId, Waiter};
use crate::transcript::Transcript;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("game {game}: {source}")]
    Game {
        game: u64,
        #[source]
        source: GameError,
    },
    #[error("game {game}: {source}")]
    Strategy {
        game: u64,
        #[source]
        source: StrategyError,
    },
    #[error("game {game}: {source}")]
    Detect {
        game: u64,
        #[source]
        source: DetectError,
    },
    #[error("could not start worker pool: {0}")]
    Workers(String),
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub n: u32,
    pub goal: GoalSpec,
    pub waiter: StrategyId,
    pub client: StrategyId,
    pub games: u64,
    pub seed: u64,
    /// Defaults to the board capacity.
    pub round_cap: Option<u64>,
    pub lone_edge: LoneEdgePolicy,
    /// Post-hoc event detection at every vertex of the final board.
    pub events: Option<EventParams>,
    pub keep_transcripts: bool,
}

impl SimConfig {
    pub fn new(n: u32, goal: GoalSpec, waiter: StrategyId, client: StrategyId, games: u64, seed: u64) -> Self {
        SimConfig {
            n,
            goal,
            waiter,
            client,
            games,
            seed,
            round_cap: None,
            lone_edge: LoneEdgePolicy::default(),
            events: None,
            keep_transcripts: false,
        }
    }
}

/// Stream `4·game + role` of the master seed; role 0 is Waiter, 1 Client.
pub fn game_seed(master: u64, game: u64, role: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(game.wrapping_mul(4).wrapping_add(role));
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EventCounts {
    pub x: u64,
    pub y: u64,
    pub s: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameRecord {
    pub game_index: u64,
    pub outcome: Outcome,
    pub stop: StopReason,
    pub rounds: u64,
    pub waiter_seed: u64,
    pub client_seed: u64,
    pub events: Option<EventCounts>,
    #[serde(skip)]
    pub transcript: Option<Transcript>,
}

/// Wilson score interval for `successes` out of `trials` at `z` standard
/// deviations.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanInterval {
    pub mean: f64,
    /// Normal-approximation 95% interval.
    pub low: f64,
    pub high: f64,
}

fn mean_interval(xs: impl Iterator<Item = f64> + Clone) -> MeanInterval {
    let n = xs.clone().count() as f64;
    if n == 0.0 {
        return MeanInterval {
            mean: 0.0,
            low: 0.0,
            high: 0.0,
        };
    }
    let mean = xs.clone().sum::<f64>() / n;
    let var = if n > 1.0 {
        xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let half = 1.96 * (var / n).sqrt();
    MeanInterval {
        mean,
        low: mean - half,
        high: mean + half,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub n: u32,
    pub goal: GoalSpec,
    pub waiter: String,
    pub client: String,
    pub games: u64,
    pub seed: u64,
    pub round_cap: u64,
    pub rng: &'static str,
    pub waiter_wins: u64,
    pub win_rate: f64,
    /// Wilson 95% interval of the win rate.
    pub win_interval: (f64, f64),
    pub mean_rounds: f64,
    pub min_rounds: u64,
    pub max_rounds: u64,
    pub events: Option<EventParams>,
    /// Mean over games of the number of vertices with S(v).
    pub s_per_game: Option<MeanInterval>,
    /// Fraction of vertex-games with S(v).
    pub s_frequency: Option<f64>,
    #[serde(skip)]
    pub records: Vec<GameRecord>,
}

impl StatsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per game.
    pub fn to_csv(&self) -> Result<String, SimError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["game_index", "outcome", "rounds", "stop", "waiter_seed", "client_seed"];
        if self.events.is_some() {
            header.extend(["x_count", "y_count", "s_count"]);
        }
        w.write_record(&header).map_err(|e| SimError::Csv(e.to_string()))?;
        for r in &self.records {
            let mut row = vec![
                r.game_index.to_string(),
                r.outcome.to_string(),
                r.rounds.to_string(),
                serde_json::to_value(r.stop)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                r.waiter_seed.to_string(),
                r.client_seed.to_string(),
            ];
            if let Some(e) = r.events {
                row.extend([e.x.to_string(), e.y.to_string(), e.s.to_string()]);
            }
            w.write_record(&row).map_err(|e| SimError::Csv(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| SimError::Csv(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| SimError::Csv(e.to_string()))
    }
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, SimError> {
    match workers {
        None => Ok(f()),
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| SimError::Workers(e.to_string()))?
            .install(f)),
    }
}

/// Counts X, Y and S over all vertices of `board`.
pub fn count_events(board: &Board, params: &EventParams) -> Result<EventCounts, DetectError> {
    let mut c = EventCounts { x: 0, y: 0, s: 0 };
    for v in 0..board.n() {
        let r = detect_events(board, v, params)?;
        c.x += u64::from(r.x);
        c.y += u64::from(r.y == Some(true));
        c.s += u64::from(r.s);
    }
    Ok(c)
}

fn run_one(config: &SimConfig, game: u64) -> Result<GameRecord, SimError> {
    let waiter_seed = game_seed(config.seed, game, 0);
    let client_seed = game_seed(config.seed, game, 1);
    let mut waiter = make_waiter(&config.waiter, config.n, config.goal, waiter_seed)
        .map_err(|source| SimError::Strategy { game, source })?;
    let mut client = make_client(&config.client, client_seed).map_err(|source| SimError::Strategy { game, source })?;
    let gc = GameConfig {
        n: config.n,
        goal: config.goal,
        round_cap: config.round_cap,
        lone_edge: config.lone_edge,
        seed: Some(config.seed),
    };
    let result = play(&gc, &mut waiter, &mut client).map_err(|source| SimError::Game { game, source })?;
    let events = match &config.events {
        Some(p) => Some(count_events(&result.board, p).map_err(|source| SimError::Detect { game, source })?),
        None => None,
    };
    Ok(GameRecord {
        game_index: game,
        outcome: result.outcome,
        stop: result.stop,
        rounds: result.rounds,
        waiter_seed,
        client_seed,
        events,
        transcript: config.keep_transcripts.then_some(result.transcript),
    })
}

/// Plays `config.games` games, on `workers` threads if given.
pub fn run_games(config: &SimConfig, workers: Option<usize>) -> Result<StatsReport, SimError> {
    if config.games == 0 {
        return Err(SimError::Config("games must be at least 1".into()));
    }
    if config.round_cap == Some(0) {
        return Err(SimError::Config("round cap must be at least 1".into()));
    }
    config
        .goal
        .validate_for(config.n)
        .map_err(|e| SimError::Config(e.to_string()))?;
    if !config.waiter.is_waiter() {
        return Err(SimError::Config(format!("{} cannot play waiter", config.waiter)));
    }
    if !config.client.is_client() {
        return Err(SimError::Config(format!("{} cannot play client", config.client)));
    }
    let records: Vec<GameRecord> = with_workers(workers, || {
        (0..config.games)
            .into_par_iter()
            .map(|g| run_one(config, g))
            .collect::<Result<Vec<_>, _>>()
    })??;
    let games = records.len() as u64;
    let wins = records.iter().filter(|r| r.outcome == Outcome::WaiterWins).count() as u64;
    let rounds = records.iter().map(|r| r.rounds);
    let s_per_game = config
        .events
        .map(|_| mean_interval(records.iter().map(|r| r.events.map_or(0.0, |e| e.s as f64))));
    let s_frequency = config.events.map(|_| {
        records.iter().map(|r| r.events.map_or(0, |e| e.s)).sum::<u64>() as f64 / (games as f64 * f64::from(config.n))
    });
    Ok(StatsReport {
        n: config.n,
        goal: config.goal,
        waiter: config.waiter.to_string(),
        client: config.client.to_string(),
        games,
        seed: config.seed,
        round_cap: config.round_cap.unwrap_or(crate::board::edge_count(config.n) / 2),
        rng: "chacha8, game i uses streams 4i (waiter) and 4i+1 (client)",
        waiter_wins: wins,
        win_rate: wins as f64 / games as f64,
        win_interval: wilson_interval(wins, games, 1.96),
        mean_rounds: rounds.clone().sum::<u64>() as f64 / games as f64,
        min_rounds: rounds.clone().min().unwrap_or(0),
        max_rounds: rounds.max().unwrap_or(0),
        events: config.events,
        s_per_game,
        s_frequency,
        records,
    })
}

/// Mean number of vertices with S(v) after the games, next to `n/(4k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SExpectation {
    pub per_game: MeanInterval,
    pub reference: f64,
    pub report: StatsReport,
}

pub fn estimate_s_expectation(config: &SimConfig, workers: Option<usize>) -> Result<SExpectation, SimError> {
    let params = config
        .events
        .ok_or_else(|| SimError::Config("event parameters required".into()))?;
    let report = run_games(config, workers)?;
    Ok(SExpectation {
        per_game: report.s_per_game.expect("events configured"),
        reference: f64::from(config.n) / (4.0 * f64::from(params.k)),
        report,
    })
}

/// Waiters trying to realize the good-pair event T(0, (1, …, k−1)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Realizer {
    /// `k−1` safe spoke rounds `(0a, 0b)`, then every rim edge offered
    /// alone against a junk edge. Gives up once a rim edge turns blue.
    SpokesThenRim,
    /// The clique builder on `2^k − 1` vertices with vertex 0 as first pivot.
    BuilderThroughV,
    /// Offers junk edges only.
    Degenerate,
}

impl Realizer {
    pub fn board_size(self, k: u32) -> u32 {
        match self {
            Realizer::SpokesThenRim | Realizer::Degenerate => 3 * k + 2,
            Realizer::BuilderThroughV => (1 << k) - 1,
        }
    }

    fn waiter(self, k: u32) -> Result<Box<dyn Waiter + Send>, StrategyError> {
        let n = self.board_size(k);
        Ok(match self {
            Realizer::SpokesThenRim => Box::new(SpokesThenRim::new(k, n)),
            Realizer::Degenerate => Box::new(JunkOnly { k, n, left: k }),
            Realizer::BuilderThroughV => Box::new(CliqueBuilder::new(k, (0..n).collect())?),
        })
    }
}

impl std::str::FromStr for Realizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spokes_then_rim" => Ok(Realizer::SpokesThenRim),
            "builder_through_v" => Ok(Realizer::BuilderThroughV),
            "degenerate" => Ok(Realizer::Degenerate),
            other => Err(format!("unknown realizer {other:?}")),
        }
    }
}

/// Edges among the top `k + 2` vertices, which the realizers never use for
/// the clique.
fn junk_edges(k: u32, n: u32) -> Vec<Edge> {
    let lo = n - (k + 2);
    (lo..n)
        .flat_map(|a| (a + 1..n).map(move |b| Edge::new(a, b).expect("distinct")))
        .collect()
}

struct SpokesThenRim {
    k: u32,
    spokes_offered: u32,
    rim: Vec<(u32, u32)>,
    junk: Vec<Edge>,
    failed: bool,
    pending_rim: Option<Edge>,
}

impl SpokesThenRim {
    fn new(k: u32, n: u32) -> Self {
        SpokesThenRim {
            k,
            spokes_offered: 0,
            rim: Vec::new(),
            junk: junk_edges(k, n),
            failed: false,
            pending_rim: None,
        }
    }
}

impl Waiter for SpokesThenRim {
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError> {
        if self.failed {
            return Ok(None);
        }
        if self.spokes_offered < self.k - 1 {
            let a = 1 + 2 * self.spokes_offered;
            self.spokes_offered += 1;
            return Ok(Some(Offer::new(Edge::new(0, a)?, Edge::new(0, a + 1)?)?));
        }
        if self.rim.is_empty() && self.pending_rim.is_none() {
            let w: Vec<u32> = board.red_neighbors(0).to_vec();
            for (i, &a) in w.iter().enumerate() {
                for &b in &w[i + 1..] {
                    self.rim.push((a, b));
                }
            }
            self.rim.reverse();
        }
        let Some((a, b)) = self.rim.pop() else {
            return Ok(None);
        };
        let rim = Edge::new(a, b)?;
        let junk = self.junk.pop().ok_or(StrategyError::GameOver)?;
        self.pending_rim = Some(rim);
        Ok(Some(Offer::new(rim, junk)?))
    }

    fn observe(&mut self, _offer: Offer, choice: Edge) {
        if let Some(rim) = self.pending_rim.take() {
            if choice != rim {
                self.failed = true;
            }
        }
    }
}

struct JunkOnly {
    k: u32,
    n: u32,
    left: u32,
}

impl Waiter for JunkOnly {
    fn next_offer(&mut self, board: &Board) -> Result<Option<Offer>, StrategyError> {
        if self.left == 0 {
            return Ok(None);
        }
        self.left -= 1;
        let free: Vec<Edge> = junk_edges(self.k, self.n)
            .into_iter()
            .filter(|&e| board.is_unclaimed(e))
            .take(2)
            .collect();
        match free[..] {
            [a, b] => Ok(Some(Offer::new(a, b)?)),
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TEstimate {
    pub k: u32,
    pub realizer: Realizer,
    pub games: u64,
    pub seed: u64,
    pub successes: u64,
    pub frequency: f64,
    /// Wilson interval at 3 standard deviations.
    pub interval: (f64, f64),
    /// `2^{−⌈(k−1)(k−2)/6⌉}`.
    pub bound: f64,
    /// Binomial standard deviation at the bound.
    pub sigma_at_bound: f64,
}

impl TEstimate {
    pub fn within_bound(&self, sigmas: f64) -> bool {
        self.frequency <= self.bound + sigmas * self.sigma_at_bound
    }
}

/// Frequency of T(0, (1, …, k−1)) with the good-pair threshold
/// `⌈(k−1)(k−2)/6⌉` over games of `realizer` against a random Client.
pub fn estimate_t_probability(
    k: u32,
    realizer: Realizer,
    games: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<TEstimate, SimError> {
    if !(3..=10).contains(&k) {
        return Err(SimError::Config(format!("k = {k} outside 3..=10")));
    }
    if games == 0 {
        return Err(SimError::Config("games must be at least 1".into()));
    }
    let n = realizer.board_size(k);
    let threshold = good_pair_bound(k as usize) as u64;
    let params = TParams {
        k,
        d_hi: u64::MAX,
        pair_threshold: threshold,
    };
    let ys: Vec<u32> = (1..k).collect();
    let hits: Vec<bool> = with_workers(workers, || {
        (0..games)
            .into_par_iter()
            .map(|g| {
                let mut w = realizer
                    .waiter(k)
                    .map_err(|source| SimError::Strategy { game: g, source })?;
                let mut c = RandomClient::new(game_seed(seed, g, 1));
                let gc = GameConfig::new(n, GoalSpec::SingleClique(k));
                let r = play(&gc, &mut w, &mut c).map_err(|source| SimError::Game { game: g, source })?;
                Ok(check_t_ordered(&r.board, 0, &ys, &params))
            })
            .collect::<Result<Vec<_>, SimError>>()
    })??;
    let successes = hits.iter().filter(|&&h| h).count() as u64;
    let bound = (-(threshold as f64)).exp2();
    Ok(TEstimate {
        k,
        realizer,
        games,
        seed,
        successes,
        frequency: successes as f64 / games as f64,
        interval: wilson_interval(successes, games, 3.0),
        bound,
        sigma_at_bound: (bound * (1.0 - bound) / games as f64).sqrt(),
    })
}

/// Plain-text summary used by the command line.
pub fn summary(report: &StatsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} games, n = {}, goal {}, waiter {}, client {}, seed {}",
        report.games, report.n, report.goal, report.waiter, report.client, report.seed
    );
    let _ = writeln!(
        s,
        "waiter wins {} ({:.4}, 95% [{:.4}, {:.4}])",
        report.waiter_wins, report.win_rate, report.win_interval.0, report.win_interval.1
    );
    let _ = writeln!(
        s,
        "rounds mean {:.3} min {} max {}",
        report.mean_rounds, report.min_rounds, report.max_rounds
    );
    if let Some(m) = report.s_per_game {
        let _ = writeln!(s, "S(v) per game mean {:.4} [{:.4}, {:.4}]", m.mean, m.low, m.high);
    }
    s
}
