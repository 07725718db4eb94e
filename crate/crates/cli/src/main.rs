//! `hanabi`: run self-play, cross-play, reference validation and the
//! external-agent bridge from the command line.
//!
//! Exit codes: 0 success, 1 validation failed, 2 usage error, 3 runtime
//! error. Log verbosity comes from `RUST_LOG`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hanabi_core::Scoring;

#[derive(Parser, Debug)]
#[command(name = "hanabi", version, about = "Hanabi agent evaluation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play one agent (or an agent and a partner) for N games.
    Selfplay(SelfplayArgs),
    /// Pair every agent of a pool with every other, itself included.
    Crossplay(CrossplayArgs),
    /// Serve games to an external agent over NDJSON.
    Bridge(BridgeArgs),
    /// Compare a run against the published reference tables.
    Validate(ValidateArgs),
    /// Write a per-turn NDJSON trace of one game.
    Trace(TraceArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Games per pairing.
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "strict", value_parser = parse_scoring)]
    scoring: Scoring,
    /// Worker threads; 1 runs sequentially, 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Extra agent definitions; an agent is then referred to by the file's
    /// `name =` line (or its file stem).
    #[arg(long = "policy-file", value_name = "PATH")]
    policy_files: Vec<PathBuf>,
}

fn parse_scoring(s: &str) -> Result<Scoring, String> {
    s.parse::<Scoring>().map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct SelfplayArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    agent: String,
    /// Defaults to the agent itself.
    #[arg(long)]
    partner: Option<String>,
    /// Seats alternate agent, partner, agent, ...
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=5))]
    players: u8,
    #[arg(long, value_enum, default_value_t = StatsFormat::Text)]
    format: StatsFormat,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum StatsFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct CrossplayArgs {
    #[command(flatten)]
    common: Common,
    /// `all`, or a comma-separated list.
    #[arg(long, default_value = "all")]
    agents: String,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Table)]
    format: MatrixFormat,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MatrixFormat {
    Csv,
    Json,
    Table,
    Markdown,
}

#[derive(Args, Debug)]
struct BridgeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Transport::Stdio)]
    transport: Transport,
    /// Address for `--transport tcp`.
    #[arg(long, default_value = "127.0.0.1:7777")]
    listen: String,
    /// In-process partner, or `self` to let the client fill every seat.
    #[arg(long, default_value = "self")]
    partner: String,
    /// How long to wait for each client reply.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
    /// TCP only: stop after this many sessions (0 = serve forever).
    #[arg(long, default_value_t = 0)]
    sessions: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Transport {
    Stdio,
    Tcp,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// 1: self-play means, 2: pairwise matrix.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    table: u8,
    /// Self-play: tolerance for most agents.
    #[arg(long, default_value_t = 1.5)]
    tol: f64,
    /// Self-play: tolerance for vdb.
    #[arg(long, default_value_t = 2.5)]
    vdb_tol: f64,
    #[arg(long, default_value_t = 0.05)]
    legal_random_max: f64,
    #[arg(long, default_value_t = 0.10)]
    flawed_max: f64,
    /// Pairwise: tolerance for cells between non-degenerate agents.
    #[arg(long, default_value_t = 2.0)]
    cell_tol: f64,
    /// Pairwise: cap for cells with legal_random or flawed.
    #[arg(long, default_value_t = 0.2)]
    degenerate_max: f64,
    /// Pairwise: cap for flawed paired with a strong agent.
    #[arg(long, default_value_t = 0.5)]
    flawed_strong_max: f64,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    agent: String,
    #[arg(long)]
    partner: Option<String>,
    /// Index of the game within the seeded run (same numbering as selfplay).
    #[arg(long, default_value_t = 0)]
    game: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    ValidationFailed,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // help and version go to stdout with status 0, real errors exit 2
        Err(e) => e.exit(),
    };
    match commands::run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(1),
        // output piped into something like `head` that stopped reading
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) if e.is::<commands::UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
