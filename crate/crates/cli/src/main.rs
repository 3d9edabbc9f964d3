use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cliquefactor::detectors::{detect_events, find_red_factor, EventParams, Variant};
use cliquefactor::game::LoneEdgePolicy;
use cliquefactor::lemma::{
    doubling_ordering, survey_component_pair_lemma, union_bound_value, verify_good_pair_lemma, Survey, SurveyMode,
};
use cliquefactor::sim::{run_games, summary, SimConfig};
use cliquefactor::solver::{solve, SolverOptions, DEFAULT_BUDGET};
use cliquefactor::strategy::StrategyId;
use cliquefactor::{GoalSpec, Transcript};
use cliquefactor_service::SessionStore;

/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! out {
    ($($t:tt)*) => {
        writeln!(std::io::stdout(), $($t)*)?
    };
}

#[derive(Parser)]
#[command(
    name = "cliquefactor",
    version,
    about = "Waiter-Client clique and clique-factor game lab"
)]
struct Cli {
    /// Worker threads for the solver and the simulation harness.
    #[arg(long, global = true, env = "CLIQUEFACTOR_WORKERS", value_parser = clap::value_parser!(u64).range(1..=1024))]
    workers: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact game value of the empty board.
    Solve(SolveArgs),
    /// Monte Carlo games between two strategies.
    Simulate(SimulateArgs),
    /// Check pair-count lemmas over edge orderings of K_k.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Build extremal edge orderings.
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Union-bound arithmetic in log space.
    Bounds(BoundsArgs),
    /// Run detectors over a transcript.
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Start the session server.
    Serve(ServeArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    goal: GoalSpec,
    /// Merge positions equal up to vertex relabelling.
    #[arg(long)]
    iso: bool,
    /// Maximum number of memo entries.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: u32,
    /// Shorthand for `--goal factor:<k>`.
    #[arg(long, conflicts_with = "goal")]
    k: Option<u32>,
    #[arg(long)]
    goal: Option<GoalSpec>,
    #[arg(long)]
    waiter: StrategyId,
    #[arg(long)]
    client: StrategyId,
    #[arg(long)]
    games: u64,
    #[arg(long)]
    seed: u64,
    /// Per-game CSV.
    #[arg(long)]
    out: PathBuf,
    /// Aggregate JSON; defaults to the CSV path with a `.json` extension.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Directory for one transcript per game.
    #[arg(long)]
    transcripts: Option<PathBuf>,
    #[arg(long)]
    round_cap: Option<u64>,
    /// Give a single leftover edge to Waiter at the end.
    #[arg(long)]
    lone_edge_to_waiter: bool,
    /// Count X/Y/S events on every final board.
    #[arg(long)]
    events: Option<Variant>,
    /// High-degree threshold for event counting.
    #[arg(long, requires = "events")]
    d_hi: Option<u64>,
    /// Counted-pair threshold for event counting.
    #[arg(long, requires = "events")]
    pair_threshold: Option<u64>,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Minimum over orderings of the largest good-pair count.
    GoodPairs(SurveyArgs),
    /// Minimum over orderings of the largest component-pair count.
    ComponentPairs(SurveyArgs),
}

#[derive(Args)]
struct SurveyArgs {
    #[arg(long)]
    k: usize,
    /// Sample this many random orderings instead of enumerating all.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// The component-doubling ordering of K_{2^t}.
    Doubling {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    k: f64,
    #[arg(long)]
    variant: Variant,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum DetectCommand {
    /// Search the final red graph for a K_k-factor.
    Factor {
        #[arg(long)]
        transcript: PathBuf,
        /// Defaults to the transcript's goal size.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Evaluate X(v), Y(v) and S(v) on the final board.
    Events {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        variant: Variant,
        #[arg(long)]
        d_hi: u64,
        #[arg(long)]
        pair_threshold: u64,
        /// Defaults to the transcript's goal size.
        #[arg(long)]
        k: Option<u32>,
        /// Only this vertex.
        #[arg(long)]
        vertex: Option<u32>,
    },
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory for session files; in memory when absent.
    #[arg(long)]
    data: Option<PathBuf>,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_solve(args: SolveArgs, workers: Option<usize>) -> Result<()> {
    let opts = SolverOptions {
        isomorphism: args.iso,
        budget: args.budget,
        workers,
    };
    let start = Instant::now();
    let report = solve(args.n, args.goal, opts)?;
    let elapsed = start.elapsed();
    out!("{}", report.value);
    for (i, (a, b, c)) in report.principal_variation.iter().enumerate() {
        out!("round {}: offer [{a}, {b}] client {c}", i + 1);
    }
    out!("states {}", report.states);
    out!("time {:.3}s", elapsed.as_secs_f64());
    if let Some(out) = args.out {
        let text = serde_json::to_string_pretty(&report)? + "\n";
        write_file(&out, &text)?;
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs, workers: Option<usize>) -> Result<()> {
    let goal = match (args.k, args.goal) {
        (Some(k), None) => GoalSpec::CliqueFactor(k),
        (None, Some(g)) => g,
        _ => bail!("pass exactly one of --k and --goal"),
    };
    let mut config = SimConfig::new(args.n, goal, args.waiter, args.client, args.games, args.seed);
    config.round_cap = args.round_cap;
    if args.lone_edge_to_waiter {
        config.lone_edge = LoneEdgePolicy::ToWaiter;
    }
    if let Some(variant) = args.events {
        let k = goal.clique_size();
        let d_hi = args
            .d_hi
            .unwrap_or_else(|| variant.degree_threshold(f64::from(k)).max(1.0) as u64);
        let pairs = args
            .pair_threshold
            .unwrap_or_else(|| variant.pair_threshold(f64::from(k)).ceil().max(0.0) as u64);
        config.events = Some(EventParams::new(k, d_hi, pairs, variant));
    }
    config.keep_transcripts = args.transcripts.is_some();
    let report = run_games(&config, workers)?;
    write_file(&args.out, &report.to_csv()?)?;
    let json = args.json.unwrap_or_else(|| args.out.with_extension("json"));
    write_file(&json, &report.to_json())?;
    if let Some(dir) = &args.transcripts {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for r in &report.records {
            if let Some(t) = &r.transcript {
                write_file(&dir.join(format!("game_{:06}.json", r.game_index)), &t.to_text())?;
            }
        }
    }
    print!("{}", summary(&report));
    Ok(())
}

fn print_survey(s: &Survey, json: bool) -> Result<()> {
    if json {
        out!("{}", serde_json::to_string_pretty(s)?);
        return Ok(());
    }
    out!("k {} orderings {}", s.k, s.orderings);
    out!("minimum {}", s.min_of_max);
    if let Some(b) = s.bound {
        out!("bound {b}");
    }
    out!("total violations {}", s.total_violations);
    out!("extremal {}", s.extremal);
    if let Some(h) = s.holds() {
        out!("{}", if h { "holds" } else { "FAILS" });
    }
    Ok(())
}

fn run_verify(cmd: VerifyCommand) -> Result<()> {
    let (args, good) = match cmd {
        VerifyCommand::GoodPairs(a) => (a, true),
        VerifyCommand::ComponentPairs(a) => (a, false),
    };
    let mode = match args.samples {
        Some(count) => SurveyMode::Samples { count, seed: args.seed },
        None => SurveyMode::Exhaustive,
    };
    let s = if good {
        verify_good_pair_lemma(args.k, mode)?
    } else {
        survey_component_pair_lemma(args.k, mode)?
    };
    print_survey(&s, args.json)?;
    if s.holds() == Some(false) {
        bail!("lemma check failed");
    }
    Ok(())
}

fn run_construct(cmd: ConstructCommand) -> Result<()> {
    match cmd {
        ConstructCommand::Doubling { t, out } => {
            let ordering = doubling_ordering(t)?;
            match out {
                Some(path) => {
                    write_file(&path, &ordering.to_text())?;
                    let counts = ordering.component_pairs();
                    out!("k {} edges {}", ordering.k(), ordering.edges().len());
                    out!("component pairs per vertex {}", counts[0]);
                }
                None => print!("{}", ordering.to_text()),
            }
        }
    }
    Ok(())
}

fn run_bounds(args: BoundsArgs) -> Result<()> {
    let r = union_bound_value(args.k, args.variant)?;
    if args.json {
        out!("{}", serde_json::to_string_pretty(&r)?);
        return Ok(());
    }
    out!("k {} variant {}", r.k, r.variant);
    out!("log2 degree threshold {:.6}", r.log2_degree_threshold);
    out!("log2 index set {:.6}", r.log2_index_set);
    out!("log2 event bound {:.6}", r.log2_event_bound);
    out!("log2 union bound {:.6}", r.log2_union_bound);
    out!("log2 target {:.6}", r.log2_target);
    out!(
        "{}",
        if r.below_target {
            "below target"
        } else {
            "not below target"
        }
    );
    Ok(())
}

fn load_transcript(path: &Path) -> Result<Transcript> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Transcript::parse(&text)?)
}

fn run_detect(cmd: DetectCommand) -> Result<()> {
    match cmd {
        DetectCommand::Factor { transcript, k } => {
            let t = load_transcript(&transcript)?;
            let board = t.replay()?;
            let k = k.unwrap_or(t.goal.clique_size());
            match find_red_factor(&board, k)? {
                Some(w) => out!("factor {w}"),
                None => out!("no factor"),
            }
        }
        DetectCommand::Events {
            transcript,
            variant,
            d_hi,
            pair_threshold,
            k,
            vertex,
        } => {
            let t = load_transcript(&transcript)?;
            let board = t.replay()?;
            let k = k.unwrap_or(t.goal.clique_size());
            let params = EventParams::new(k, d_hi, pair_threshold, variant);
            let vertices: Vec<u32> = match vertex {
                Some(v) => vec![v],
                None => (0..board.n()).collect(),
            };
            let mut reports = Vec::with_capacity(vertices.len());
            for v in vertices {
                reports.push(detect_events(&board, v, &params)?);
            }
            let doc = serde_json::json!({ "params": params, "vertices": reports });
            out!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(())
}

fn run_serve(args: ServeArgs) -> Result<()> {
    let store = match &args.data {
        Some(dir) => SessionStore::open(dir)?,
        None => SessionStore::in_memory(),
    };
    for issue in store.issues() {
        eprintln!("skipping {}: {}", issue.path.display(), issue.reason);
    }
    eprintln!("listening on {} with {} sessions", args.addr, store.len());
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(cliquefactor_service::serve(args.addr, Arc::new(store)))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let workers = cli.workers.map(|w| w as usize);
    match cli.command {
        Command::Solve(a) => run_solve(a, workers),
        Command::Simulate(a) => run_simulate(a, workers),
        Command::Verify(c) => run_verify(c),
        Command::Construct(c) => run_construct(c),
        Command::Bounds(a) => run_bounds(a),
        Command::Detect(c) => run_detect(c),
        Command::Serve(a) => run_serve(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<std::io::Error>().map(|e| e.kind()) == Some(std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
