//! Server side of an external-agent session.
//!
//! A session serves one client over any line-oriented byte stream: the
//! server's own stdin/stdout, a TCP connection, or in-memory pipes in tests.
//! After the `hello` exchange the server plays `n_games` games, sending
//! `game_start`, one `observe_and_act` per client turn (each answered by
//! exactly one `move`) and `game_over`. The server closes the stream after the
//! last game. Any protocol violation sends an `error` message and ends the
//! session.

use std::cell::RefCell;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::rc::Rc;
use std::sync::mpsc;
use std::time::Duration;

use crate::agents::Policy;
use crate::engine::{GameConfig, Move, Scoring};
use crate::harness::{run_game, GameResult, GameSpec, HarnessError, PairingStats, PolicySeat, Seat, SeatError};
use crate::observation::Observation;
use crate::rng::{derive_seed, GameRng};

use super::encoder::encode_observation;
use super::protocol::{ErrorCode, ProtocolMessage, WireMove, WireObservation, PROTOCOL_VERSION};

pub const DEFAULT_MOVE_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, thiserror::Error)]
pub enum BridgeError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("client closed the connection")]
    Closed,
    #[error("no reply within {0:?}")]
    Timeout(Duration),
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("unexpected message: {0}")]
    Unexpected(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("protocol version mismatch: client {client}, server {server}")]
    VersionMismatch { client: u32, server: u32 },
    #[error(transparent)]
    Harness(HarnessError),
}

impl BridgeError {
    fn code(&self) -> ErrorCode {
        match self {
            BridgeError::Timeout(_) => ErrorCode::Timeout,
            BridgeError::Malformed(_) => ErrorCode::MalformedMessage,
            BridgeError::Unexpected(_) => ErrorCode::UnexpectedMessage,
            BridgeError::IllegalMove(_) => ErrorCode::IllegalMove,
            BridgeError::VersionMismatch { .. } => ErrorCode::VersionMismatch,
            _ => ErrorCode::Internal,
        }
    }
}

/// A line-oriented duplex stream with a receive timeout.
pub struct Connection {
    lines: mpsc::Receiver<io::Result<String>>,
    writer: Box<dyn Write + Send>,
    timeout: Duration,
    /// Shut down on drop so the peer sees end of stream even though the
    /// reader thread still holds a handle.
    socket: Option<TcpStream>,
}

impl Connection {
    /// Lines are read on a background thread so that waits can time out.
    pub fn new<R, W>(reader: R, writer: W, timeout: Duration) -> Connection
    where
        R: Read + Send + 'static,
        W: Write + Send + 'static,
    {
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Connection {
            lines: rx,
            writer: Box::new(writer),
            timeout,
            socket: None,
        }
    }

    /// The current process's stdin and stdout.
    pub fn stdio(timeout: Duration) -> Connection {
        Connection::new(io::stdin(), io::stdout(), timeout)
    }

    pub fn tcp(stream: TcpStream, timeout: Duration) -> io::Result<Connection> {
        // one small message per turn; do not wait to coalesce
        stream.set_nodelay(true)?;
        let reader = stream.try_clone()?;
        let socket = stream.try_clone()?;
        let mut conn = Connection::new(reader, stream, timeout);
        conn.socket = Some(socket);
        Ok(conn)
    }

    pub fn send(&mut self, msg: &ProtocolMessage) -> io::Result<()> {
        let mut line = msg.to_line();
        line.push('\n');
        self.writer.write_all(line.as_bytes())?;
        self.writer.flush()
    }

    pub fn recv(&mut self) -> Result<ProtocolMessage, BridgeError> {
        loop {
            let line = match self.lines.recv_timeout(self.timeout) {
                Ok(line) => line?,
                Err(mpsc::RecvTimeoutError::Timeout) => return Err(BridgeError::Timeout(self.timeout)),
                Err(mpsc::RecvTimeoutError::Disconnected) => return Err(BridgeError::Closed),
            };
            if line.trim().is_empty() {
                continue;
            }
            return ProtocolMessage::from_line(&line).map_err(|e| BridgeError::Malformed(e.to_string()));
        }
    }
}

impl Drop for Connection {
    fn drop(&mut self) {
        if let Some(s) = &self.socket {
            let _ = self.writer.flush();
            let _ = s.shutdown(std::net::Shutdown::Both);
        }
    }
}

/// Who sits opposite the external client.
#[derive(Debug, Clone)]
pub enum Partner {
    Policy(Policy),
    /// The client controls every seat.
    SelfPlay,
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub n_games: u64,
    pub master_seed: u64,
    pub scoring: Scoring,
}

impl SessionConfig {
    /// Seed of game `index`; matches [`crate::harness::MatchConfig::game_seed`].
    pub fn game_seed(&self, index: u64) -> u64 {
        derive_seed(self.master_seed, index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionReport {
    pub client_agent: Option<String>,
    /// Final scores in game order.
    pub scores: Vec<u8>,
    pub stats: PairingStats,
}

struct Client {
    conn: Connection,
    pending_start: Option<ProtocolMessage>,
    finished_game: Option<u64>,
    /// Set when the client misbehaved; reported instead of the seat error.
    fault: Option<BridgeError>,
}

impl Client {
    fn send(&mut self, msg: &ProtocolMessage) -> Result<(), BridgeError> {
        if let Some(start) = self.pending_start.take() {
            self.conn.send(&start)?;
        }
        Ok(self.conn.send(msg)?)
    }

    fn fail(&mut self, err: BridgeError) -> SeatError {
        let text = err.to_string();
        self.fault = Some(err);
        SeatError::External(text)
    }
}

struct ExternalSeat(Rc<RefCell<Client>>);

impl Seat for ExternalSeat {
    fn game_start(&mut self, game_id: u64, player: usize, config: &GameConfig) -> Result<(), SeatError> {
        let mut client = self.0.borrow_mut();
        match &mut client.pending_start {
            Some(ProtocolMessage::GameStart { game_id: g, seats, .. }) if *g == game_id => seats.push(player),
            _ => {
                client.pending_start = Some(ProtocolMessage::GameStart {
                    game_id,
                    num_players: config.num_players,
                    seats: vec![player],
                    scoring: config.scoring,
                })
            }
        }
        Ok(())
    }

    fn act(&mut self, game_id: u64, turn: u32, obs: &Observation, _rng: &mut GameRng) -> Result<Move, SeatError> {
        let mut client = self.0.borrow_mut();
        let actor = obs.observer;
        let n = obs.num_players;
        let legal = obs.legal_moves();
        let request = ProtocolMessage::ObserveAndAct {
            game_id,
            turn,
            seat: actor,
            observation: WireObservation::from_observation(obs),
            legal_moves: legal.iter().map(|m| WireMove::from_move(*m, actor, n)).collect(),
            encoded_vector: encode_observation(obs).0,
        };
        if let Err(e) = client.send(&request) {
            return Err(client.fail(e));
        }
        let reply = match client.conn.recv() {
            Ok(m) => m,
            Err(e) => return Err(client.fail(e)),
        };
        match reply {
            ProtocolMessage::Move { game_id: g, mv } if g == game_id => {
                let mv = mv.to_move(actor, n);
                if legal.contains(&mv) {
                    Ok(mv)
                } else {
                    Err(client.fail(BridgeError::IllegalMove(format!(
                        "{} is not legal at turn {turn}",
                        serde_json::to_string(&WireMove::from_move(mv, actor, n)).unwrap_or_default()
                    ))))
                }
            }
            ProtocolMessage::Move { game_id: g, .. } => Err(client.fail(BridgeError::Unexpected(format!(
                "move for game {g} while game {game_id} is running"
            )))),
            other => Err(client.fail(BridgeError::Unexpected(format!(
                "expected a move, got {}",
                other.to_line()
            )))),
        }
    }

    fn game_over(&mut self, game_id: u64, result: &GameResult) -> Result<(), SeatError> {
        let mut client = self.0.borrow_mut();
        if client.finished_game == Some(game_id) {
            return Ok(());
        }
        client.finished_game = Some(game_id);
        let msg = ProtocolMessage::GameOver {
            game_id,
            score: result.score,
            fireworks: result.fireworks,
            lives: result.lives,
            turns: result.turns,
        };
        client.send(&msg).map_err(|e| client.fail(e))
    }
}

/// Runs a whole session and returns the per-game scores.
///
/// The client is agent 0 and `partner` agent 1 of each game, exactly as
/// `run_pairing` lines up `agent_a` and `agent_b`, and game `i` uses
/// `cfg.game_seed(i)`. A deterministic client therefore reproduces the scores
/// of its in-process twin game for game.
pub fn serve_session(conn: Connection, partner: &Partner, cfg: &SessionConfig) -> Result<SessionReport, BridgeError> {
    let client = Rc::new(RefCell::new(Client {
        conn,
        pending_start: None,
        finished_game: None,
        fault: None,
    }));
    let result = run_session(&client, partner, cfg);
    if let Err(e) = &result {
        let mut c = client.borrow_mut();
        if !matches!(e, BridgeError::Closed | BridgeError::Io(_)) {
            let msg = ProtocolMessage::Error {
                code: e.code(),
                message: e.to_string(),
            };
            if let Err(send_err) = c.conn.send(&msg) {
                log::debug!("could not report error to client: {send_err}");
            }
        }
    }
    result
}

fn run_session(client: &Rc<RefCell<Client>>, partner: &Partner, cfg: &SessionConfig) -> Result<SessionReport, BridgeError> {
    let agent = {
        let mut c = client.borrow_mut();
        match c.conn.recv()? {
            ProtocolMessage::Hello { protocol_version, agent } => {
                if protocol_version != PROTOCOL_VERSION {
                    return Err(BridgeError::VersionMismatch {
                        client: protocol_version,
                        server: PROTOCOL_VERSION,
                    });
                }
                c.conn.send(&ProtocolMessage::Hello {
                    protocol_version: PROTOCOL_VERSION,
                    agent: Some(concat!("hanabi-core/", env!("CARGO_PKG_VERSION")).into()),
                })?;
                agent
            }
            other => return Err(BridgeError::Unexpected(format!("expected hello, got {}", other.to_line()))),
        }
    };
    if cfg.n_games == 0 {
        return Err(BridgeError::Harness(HarnessError::InvalidConfig("n_games must be at least 1".into())));
    }

    let mut scores = Vec::with_capacity(cfg.n_games as usize);
    for game_id in 0..cfg.n_games {
        let spec = GameSpec {
            game_id,
            seed: cfg.game_seed(game_id),
            scoring: cfg.scoring,
            record_trace: false,
        };
        let mut external = ExternalSeat(Rc::clone(client));
        let outcome = match partner {
            Partner::Policy(policy) => {
                let mut other = PolicySeat(policy);
                run_game(&mut [&mut external, &mut other], spec)
            }
            Partner::SelfPlay => {
                let mut second = ExternalSeat(Rc::clone(client));
                run_game(&mut [&mut external, &mut second], spec)
            }
        };
        match outcome {
            Ok(r) => scores.push(r.score),
            Err(e) => {
                return Err(client.borrow_mut().fault.take().unwrap_or(BridgeError::Harness(e)));
            }
        }
    }
    log::info!("session finished: {} games", scores.len());
    Ok(SessionReport {
        client_agent: agent,
        stats: PairingStats::from_scores(&scores),
        scores,
    })
}
