use rand::seq::SliceRandom;

use crate::agents::{AgentError, Policy};
use crate::engine::{EngineError, GameConfig, GameState, Move, Scoring};
use crate::observation::Observation;
use crate::rng::{agent_rng, derive_seed, GameRng};
use crate::trace::TraceRecord;

use super::{Execution, PairingStats};

/// Hard stop for runaway games. A legal 2-player game ends well before this.
const MAX_TURNS: u32 = 1_000;

#[derive(Debug, thiserror::Error)]
pub enum SeatError {
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("{0}")]
    External(String),
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid match configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("game {game_id}: agent {agent} failed: {source}")]
    Seat {
        game_id: u64,
        agent: usize,
        #[source]
        source: SeatError,
    },
    #[error("game {game_id}: agent {agent} chose an illegal move: {source}")]
    IllegalMove {
        game_id: u64,
        agent: usize,
        #[source]
        source: EngineError,
    },
    #[error("game {0} did not finish within {MAX_TURNS} turns")]
    Runaway(u64),
}

/// Anything that can occupy a seat: an in-process policy or an external
/// client.
pub trait Seat {
    /// Called once seating is fixed. `player` is this agent's player index.
    fn game_start(&mut self, _game_id: u64, _player: usize, _config: &GameConfig) -> Result<(), SeatError> {
        Ok(())
    }

    fn act(&mut self, game_id: u64, turn: u32, obs: &Observation, rng: &mut GameRng) -> Result<Move, SeatError>;

    fn game_over(&mut self, _game_id: u64, _result: &GameResult) -> Result<(), SeatError> {
        Ok(())
    }
}

/// A borrowed policy as a seat.
pub struct PolicySeat<'a>(pub &'a Policy);

impl Seat for PolicySeat<'_> {
    fn act(&mut self, _game_id: u64, _turn: u32, obs: &Observation, rng: &mut GameRng) -> Result<Move, SeatError> {
        Ok(self.0.decide(obs, rng)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    pub game_id: u64,
    pub seed: u64,
    pub score: u8,
    /// Fireworks total regardless of lives.
    pub fireworks: u8,
    pub lives: u8,
    pub turns: u32,
    /// `players[i]` is the player index given to the i-th agent.
    pub players: Vec<usize>,
    /// Empty unless tracing was requested.
    pub trace: Vec<TraceRecord>,
}

/// Settings for one game.
#[derive(Debug, Clone, Copy)]
pub struct GameSpec {
    pub game_id: u64,
    pub seed: u64,
    pub scoring: Scoring,
    pub record_trace: bool,
}

/// Plays one game to the end.
///
/// `agents.len()` is the player count. Which agent takes which player index
/// (and so who moves first) is drawn from the game's generator before the
/// deal; the deck shuffle uses its own stream seeded from `spec.seed`.
pub fn run_game(agents: &mut [&mut dyn Seat], spec: GameSpec) -> Result<GameResult, HarnessError> {
    let n = agents.len();
    let config = GameConfig::new(n, spec.scoring, spec.seed);
    let mut state = GameState::new(config)?;
    let mut rng = agent_rng(spec.seed);

    let mut players: Vec<usize> = (0..n).collect();
    players.shuffle(&mut rng);
    let mut agent_of_player = vec![0; n];
    for (agent, &player) in players.iter().enumerate() {
        agent_of_player[player] = agent;
    }

    let seat_err = |agent, source| HarnessError::Seat {
        game_id: spec.game_id,
        agent,
        source,
    };
    for (agent, seat) in agents.iter_mut().enumerate() {
        seat.game_start(spec.game_id, players[agent], &config)
            .map_err(|e| seat_err(agent, e))?;
    }

    let mut trace = Vec::new();
    while !state.is_terminal() {
        if state.turn() >= MAX_TURNS {
            return Err(HarnessError::Runaway(spec.game_id));
        }
        let player = state.current_player();
        let agent = agent_of_player[player];
        let obs = state.observe(player)?;
        let mv = agents[agent]
            .act(spec.game_id, state.turn(), &obs, &mut rng)
            .map_err(|e| seat_err(agent, e))?;
        let record = state
            .apply_move(mv)
            .map_err(|source| HarnessError::IllegalMove {
                game_id: spec.game_id,
                agent,
                source,
            })?
            .clone();
        if spec.record_trace {
            trace.push(TraceRecord::after(&state, &record));
        }
    }

    let result = GameResult {
        game_id: spec.game_id,
        seed: spec.seed,
        score: state.final_score()?,
        fireworks: state.fireworks_score(),
        lives: state.lives(),
        turns: state.turn(),
        players,
        trace,
    };
    for (agent, seat) in agents.iter_mut().enumerate() {
        seat.game_over(spec.game_id, &result)
            .map_err(|e| seat_err(agent, e))?;
    }
    Ok(result)
}

/// Plays one game between in-process policies.
pub fn play_policies(policies: &[&Policy], spec: GameSpec) -> Result<GameResult, HarnessError> {
    let mut seats: Vec<PolicySeat<'_>> = policies.iter().map(|p| PolicySeat(p)).collect();
    let mut refs: Vec<&mut dyn Seat> = seats.iter_mut().map(|s| s as &mut dyn Seat).collect();
    run_game(&mut refs, spec)
}

#[derive(Debug, Clone)]
pub struct MatchConfig {
    pub agent_a: Policy,
    pub agent_b: Policy,
    pub n_games: u64,
    pub master_seed: u64,
    pub scoring: Scoring,
    /// Seats alternate a, b, a, ... before seat randomization.
    pub num_players: usize,
}

impl MatchConfig {
    pub fn new(agent_a: Policy, agent_b: Policy, n_games: u64, master_seed: u64) -> MatchConfig {
        MatchConfig {
            agent_a,
            agent_b,
            n_games,
            master_seed,
            scoring: Scoring::Strict,
            num_players: 2,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_games == 0 {
            return Err(HarnessError::InvalidConfig("n_games must be at least 1".into()));
        }
        if !(2..=5).contains(&self.num_players) {
            return Err(HarnessError::InvalidConfig(format!(
                "num_players must be 2..=5, got {}",
                self.num_players
            )));
        }
        Ok(())
    }

    /// Seed of the `index`-th game.
    pub fn game_seed(&self, index: u64) -> u64 {
        derive_seed(self.master_seed, index)
    }

    pub(crate) fn lineup(&self) -> Vec<&Policy> {
        (0..self.num_players)
            .map(|i| if i % 2 == 0 { &self.agent_a } else { &self.agent_b })
            .collect()
    }
}

/// Final scores of every game of a pairing, in game order.
pub fn pairing_scores(cfg: &MatchConfig, exec: Execution) -> Result<Vec<u8>, HarnessError> {
    cfg.validate()?;
    let lineup = cfg.lineup();
    let play = |i: u64| {
        play_policies(
            &lineup,
            GameSpec {
                game_id: i,
                seed: cfg.game_seed(i),
                scoring: cfg.scoring,
                record_trace: false,
            },
        )
        .map(|r| r.score)
    };
    exec.map_indexed(cfg.n_games, play)
}

/// Plays `n_games` games and summarizes the scores. Any failed game fails the
/// whole pairing.
pub fn run_pairing(cfg: &MatchConfig, exec: Execution) -> Result<PairingStats, HarnessError> {
    let scores = pairing_scores(cfg, exec)?;
    Ok(PairingStats::from_scores(&scores))
}
