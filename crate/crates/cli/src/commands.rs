use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::TcpListener;
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use hanabi_core::agents::{preset, Policy, PRESET_NAMES};
use hanabi_core::bridge::{serve_session, Connection, Partner, SessionConfig, SessionReport};
use hanabi_core::harness::reference::{
    check_pairwise, check_self_play, Check, PairwiseTolerances, SelfPlayTolerances,
};
use hanabi_core::harness::{
    cross_play, play_policies, render_csv, render_json, render_markdown, render_table, run_pairing, Execution,
    GameSpec, MatchConfig, PairingStats,
};
use hanabi_core::trace::write_ndjson;

use crate::{
    BridgeArgs, Command, Common, CrossplayArgs, MatrixFormat, Outcome, SelfplayArgs, StatsFormat, Transport,
    TraceArgs, ValidateArgs,
};

/// A bad value that clap could not catch, such as an unknown agent name.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Selfplay(a) => selfplay(a),
        Command::Crossplay(a) => crossplay(a),
        Command::Bridge(a) => bridge(a),
        Command::Validate(a) => validate(a),
        Command::Trace(a) => trace(a),
    }
}

/// Presets plus whatever `--policy-file` defined; files win on name clashes.
struct Agents(BTreeMap<String, Policy>);

impl Agents {
    fn load(common: &Common) -> Result<Agents> {
        let mut map = BTreeMap::new();
        for path in &common.policy_files {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
            let policy = Policy::parse(&text, stem).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            log::info!("loaded policy {:?} from {}", policy.name(), path.display());
            map.insert(policy.name().to_string(), policy);
        }
        Ok(Agents(map))
    }

    fn get(&self, name: &str) -> Result<Policy> {
        if let Some(p) = self.0.get(name) {
            return Ok(p.clone());
        }
        preset(name).map_err(|_| {
            let mut known: Vec<&str> = PRESET_NAMES.to_vec();
            known.extend(self.0.keys().map(String::as_str));
            UsageError(format!("unknown agent {name:?} (known: {})", known.join(", "))).into()
        })
    }

    /// `all` means the presets in report order followed by file agents.
    fn pool(&self, spec: &str) -> Result<Vec<Policy>> {
        if spec == "all" {
            let mut names: Vec<&str> = PRESET_NAMES.iter().copied().filter(|n| !self.0.contains_key(*n)).collect();
            names.extend(self.0.keys().map(String::as_str));
            return names.into_iter().map(|n| self.get(n)).collect();
        }
        let names: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if names.is_empty() {
            return Err(UsageError("--agents is empty".into()).into());
        }
        names.into_iter().map(|n| self.get(n)).collect()
    }
}

fn exec(common: &Common) -> Execution {
    Execution::from_jobs(common.jobs)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn selfplay(a: SelfplayArgs) -> Result<Outcome> {
    let agents = Agents::load(&a.common)?;
    let agent = agents.get(&a.agent)?;
    let partner = match &a.partner {
        Some(p) => agents.get(p)?,
        None => agent.clone(),
    };
    let cfg = MatchConfig {
        scoring: a.common.scoring,
        num_players: a.players as usize,
        ..MatchConfig::new(agent, partner, a.common.n, a.common.seed)
    };
    let stats = run_pairing(&cfg, exec(&a.common))?;
    match a.format {
        StatsFormat::Text => println!(
            "{} + {}: n={} mean={:.2} sd={:.2} sem={:.3} zero={:.3}",
            cfg.agent_a.name(),
            cfg.agent_b.name(),
            stats.n,
            stats.mean,
            stats.sd,
            stats.sem,
            stats.zero_fraction()
        ),
        StatsFormat::Json => println!("{}", serde_json::to_string_pretty(&stats)?),
    }
    Ok(Outcome::Ok)
}

fn crossplay(a: CrossplayArgs) -> Result<Outcome> {
    let pool = Agents::load(&a.common)?.pool(&a.agents)?;
    let m = cross_play(&pool, a.common.n, a.common.seed, a.common.scoring, exec(&a.common))?;
    let text = match a.format {
        MatrixFormat::Csv => render_csv(&m),
        MatrixFormat::Json => render_json(&m),
        MatrixFormat::Table => render_table(&m),
        MatrixFormat::Markdown => render_markdown(&m),
    };
    let mut out = output(a.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(Outcome::Ok)
}

fn report(checks: &[Check]) -> Outcome {
    for c in checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed == 0 {
        Outcome::Ok
    } else {
        Outcome::ValidationFailed
    }
}

fn validate(a: ValidateArgs) -> Result<Outcome> {
    let c = &a.common;
    let pool: Vec<Policy> = PRESET_NAMES.iter().map(|n| preset(n)).collect::<Result<_, _>>()?;
    if a.table == 1 {
        let tol = SelfPlayTolerances {
            legal_random_max: a.legal_random_max,
            flawed_max: a.flawed_max,
            default_tol: a.tol,
            vdb_tol: a.vdb_tol,
        };
        let mut means = Vec::new();
        for p in pool {
            let cfg = MatchConfig { scoring: c.scoring, ..MatchConfig::new(p.clone(), p.clone(), c.n, c.seed) };
            let stats: PairingStats = run_pairing(&cfg, exec(c))?;
            log::info!("{}: {:.2} (sd {:.2})", p.name(), stats.mean, stats.sd);
            means.push((p.name().to_string(), stats.mean));
        }
        Ok(report(&check_self_play(&means, &tol)))
    } else {
        let tol = PairwiseTolerances {
            degenerate_max: a.degenerate_max,
            flawed_strong_max: a.flawed_strong_max,
            cell_tol: a.cell_tol,
        };
        let m = cross_play(&pool, c.n, c.seed, c.scoring, exec(c))?;
        print!("{}", render_table(&m));
        println!();
        Ok(report(&check_pairwise(&m, &tol)))
    }
}

fn trace(a: TraceArgs) -> Result<Outcome> {
    let agents = Agents::load(&a.common)?;
    let agent = agents.get(&a.agent)?;
    let partner = match &a.partner {
        Some(p) => agents.get(p)?,
        None => agent.clone(),
    };
    let cfg = MatchConfig::new(agent.clone(), partner.clone(), a.game + 1, a.common.seed);
    let result = play_policies(
        &[&agent, &partner],
        GameSpec {
            game_id: a.game,
            seed: cfg.game_seed(a.game),
            scoring: a.common.scoring,
            record_trace: true,
        },
    )?;
    write_ndjson(output(a.out.as_deref())?, &result.trace)?;
    eprintln!(
        "game {} seed {}: score {} after {} turns (agent seated as player {})",
        result.game_id, result.seed, result.score, result.turns, result.players[0]
    );
    Ok(Outcome::Ok)
}

fn bridge(a: BridgeArgs) -> Result<Outcome> {
    let agents = Agents::load(&a.common)?;
    let partner = match a.partner.as_str() {
        "self" => Partner::SelfPlay,
        name => Partner::Policy(agents.get(name)?),
    };
    let cfg = SessionConfig {
        n_games: a.common.n,
        master_seed: a.common.seed,
        scoring: a.common.scoring,
    };
    let timeout = Duration::from_millis(a.timeout_ms);
    match a.transport {
        Transport::Stdio => {
            // stdout carries the protocol, so the summary goes to stderr
            let report = serve_session(Connection::stdio(timeout), &partner, &cfg)?;
            summarize("stdio", &report);
        }
        Transport::Tcp => {
            let listener = TcpListener::bind(&a.listen).with_context(|| format!("binding {}", a.listen))?;
            eprintln!("listening on {}", listener.local_addr()?);
            let mut served = 0;
            let mut workers = Vec::new();
            for stream in listener.incoming() {
                let stream = stream?;
                let peer = stream.peer_addr().map(|p| p.to_string()).unwrap_or_else(|_| "?".into());
                let (partner, cfg) = (partner.clone(), cfg.clone());
                workers.push(std::thread::spawn(move || {
                    let result = Connection::tcp(stream, timeout)
                        .map_err(Into::into)
                        .and_then(|conn| serve_session(conn, &partner, &cfg));
                    match result {
                        Ok(report) => summarize(&peer, &report),
                        Err(e) => log::error!("session {peer}: {e}"),
                    }
                }));
                served += 1;
                if a.sessions != 0 && served >= a.sessions {
                    break;
                }
            }
            for w in workers {
                let _ = w.join();
            }
        }
    }
    Ok(Outcome::Ok)
}

fn summarize(who: &str, r: &SessionReport) {
    eprintln!(
        "session {who} ({}): n={} mean={:.2} sd={:.2} sem={:.3}",
        r.client_agent.as_deref().unwrap_or("anonymous"),
        r.stats.n,
        r.stats.mean,
        r.stats.sd,
        r.stats.sem
    );
}
