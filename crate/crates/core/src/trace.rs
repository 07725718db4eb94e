//! Per-turn game traces, one NDJSON object per line.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::bridge::WireMove;
use crate::engine::{GameState, MoveRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub turn: u32,
    pub player: usize,
    #[serde(rename = "move")]
    pub mv: WireMove,
    /// Fireworks total after the move.
    pub resulting_score: u8,
    pub lives: u8,
    pub tokens: u8,
}

impl TraceRecord {
    /// Record for the move just applied to `state`.
    pub fn after(state: &GameState, record: &MoveRecord) -> TraceRecord {
        TraceRecord {
            turn: state.turn() - 1,
            player: record.player,
            mv: WireMove::from_move(record.mv, record.player, state.config().num_players),
            resulting_score: state.fireworks_score(),
            lives: state.lives(),
            tokens: state.info_tokens(),
        }
    }
}

pub fn write_ndjson<W: Write>(mut out: W, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
