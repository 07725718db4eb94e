//! Hanabi for agent evaluation.
//!
//! - [`engine`]: the game rules and state machine.
//! - [`knowledge`]: per-card candidate tracking and playability judgments.
//! - [`agents`]: rule primitives and the seven reference rule-based agents.
//! - [`harness`]: Monte-Carlo pairings and cross-play matrices.
//! - [`bridge`]: NDJSON protocol and observation encoder for external agents.

pub mod agents;
pub mod bridge;
pub mod card;
pub mod engine;
pub mod harness;
pub mod knowledge;
pub mod observation;
pub mod rng;
pub mod trace;

pub use card::{Card, Color, Fireworks};
pub use engine::{GameConfig, GameState, Hint, Move, Scoring};
pub use observation::Observation;
