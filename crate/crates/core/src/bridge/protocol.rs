//! NDJSON message types.
//!
//! Every message is one line of UTF-8 JSON with a `type` field. Player
//! references on the wire are offsets from the receiving seat: 0 is the seat
//! itself, 1 the next player in turn order, and so on.

use serde::{Deserialize, Serialize};

use crate::card::{Card, Color};
use crate::engine::{Hint, Move, MoveRecord, Scoring};
use crate::knowledge::CardKnowledge;
use crate::observation::Observation;

pub const PROTOCOL_VERSION: u32 = 1;

// observations dominate; one message is alive at a time, so boxing buys nothing
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProtocolMessage {
    /// Sent first by the client, answered by the server.
    Hello {
        protocol_version: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        agent: Option<String>,
    },
    /// `seats` lists the player indices the client controls in this game.
    GameStart {
        game_id: u64,
        num_players: usize,
        seats: Vec<usize>,
        scoring: Scoring,
    },
    ObserveAndAct {
        game_id: u64,
        turn: u32,
        seat: usize,
        observation: WireObservation,
        legal_moves: Vec<WireMove>,
        encoded_vector: Vec<u8>,
    },
    Move {
        game_id: u64,
        #[serde(rename = "move")]
        mv: WireMove,
    },
    GameOver {
        game_id: u64,
        score: u8,
        fireworks: u8,
        lives: u8,
        turns: u32,
    },
    Error { code: ErrorCode, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    VersionMismatch,
    MalformedMessage,
    UnexpectedMessage,
    IllegalMove,
    Timeout,
    Internal,
}

impl ProtocolMessage {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("protocol messages serialize")
    }

    pub fn from_line(line: &str) -> serde_json::Result<ProtocolMessage> {
        serde_json::from_str(line)
    }
}

/// Move schema shared by the protocol and game traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WireMove {
    Play {
        slot: usize,
    },
    Discard {
        slot: usize,
    },
    Hint {
        target_offset: usize,
        #[serde(flatten)]
        hint: WireHint,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireHint {
    Color { color: Color },
    Rank { rank: u8 },
}

impl WireMove {
    pub fn from_move(mv: Move, actor: usize, num_players: usize) -> WireMove {
        match mv {
            Move::Play { slot } => WireMove::Play { slot },
            Move::Discard { slot } => WireMove::Discard { slot },
            Move::Hint { target, hint } => WireMove::Hint {
                target_offset: (target + num_players - actor) % num_players,
                hint: match hint {
                    Hint::Color(color) => WireHint::Color { color },
                    Hint::Rank(rank) => WireHint::Rank { rank },
                },
            },
        }
    }

    /// Resolves offsets for `actor`. Offsets are taken modulo the player
    /// count; the engine rejects self-targeted hints.
    pub fn to_move(self, actor: usize, num_players: usize) -> Move {
        match self {
            WireMove::Play { slot } => Move::Play { slot },
            WireMove::Discard { slot } => Move::Discard { slot },
            WireMove::Hint { target_offset, hint } => Move::Hint {
                target: (actor + target_offset) % num_players,
                hint: match hint {
                    WireHint::Color { color } => Hint::Color(color),
                    WireHint::Rank { rank } => Hint::Rank(rank),
                },
            },
        }
    }
}

/// Slot knowledge on the wire: the still-possible colors as letters and
/// ranks as digits, e.g. `"RGB"` and `"125"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireKnowledge {
    pub colors: String,
    pub ranks: String,
    pub color_hinted: bool,
    pub rank_hinted: bool,
}

impl From<&CardKnowledge> for WireKnowledge {
    fn from(k: &CardKnowledge) -> Self {
        WireKnowledge {
            colors: Color::ALL
                .iter()
                .filter(|c| k.color_possible(**c))
                .map(|c| c.letter())
                .collect(),
            ranks: (1..=5u8)
                .filter(|r| k.rank_possible(*r))
                .map(|r| char::from(b'0' + r))
                .collect(),
            color_hinted: k.color_hinted,
            rank_hinted: k.rank_hinted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireLastMove {
    pub player_offset: usize,
    #[serde(rename = "move")]
    pub mv: WireMove,
    pub card: Option<Card>,
    pub success: bool,
    pub info_token_added: bool,
    pub touched: Vec<usize>,
}

/// Structured observation; per-player arrays are indexed by offset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireObservation {
    pub num_players: usize,
    pub current_player_offset: usize,
    /// `null` for the receiving seat.
    pub hands: Vec<Option<Vec<Card>>>,
    pub hand_sizes: Vec<usize>,
    pub knowledge: Vec<Vec<WireKnowledge>>,
    /// Pile heights in R, Y, G, W, B order.
    pub fireworks: [u8; 5],
    pub discard: Vec<Card>,
    pub info_tokens: u8,
    pub lives: u8,
    pub deck_size: usize,
    pub last_move: Option<WireLastMove>,
}

impl WireObservation {
    pub fn from_observation(obs: &Observation) -> WireObservation {
        let by_offset = |offset: usize| obs.player_at_offset(offset);
        let n = obs.num_players;
        WireObservation {
            num_players: n,
            current_player_offset: obs.offset_of(obs.current_player),
            hands: (0..n).map(|o| obs.hands[by_offset(o)].clone()).collect(),
            hand_sizes: (0..n).map(|o| obs.hand_sizes[by_offset(o)]).collect(),
            knowledge: (0..n)
                .map(|o| obs.knowledge[by_offset(o)].iter().map(WireKnowledge::from).collect())
                .collect(),
            fireworks: obs.fireworks.0,
            discard: obs.discard.clone(),
            info_tokens: obs.info_tokens,
            lives: obs.lives,
            deck_size: obs.deck_size,
            last_move: obs.last_move.as_ref().map(|r| last_move_for(obs, r)),
        }
    }
}

fn last_move_for(obs: &Observation, r: &MoveRecord) -> WireLastMove {
    WireLastMove {
        player_offset: obs.offset_of(r.player),
        mv: WireMove::from_move(r.mv, r.player, obs.num_players),
        card: r.card,
        success: r.success,
        info_token_added: r.info_token_added,
        touched: r.touched.clone(),
    }
}
