//! A single player's view of the game.

use serde::{Deserialize, Serialize};

use crate::card::{Card, CardCounts, Fireworks};
use crate::engine::{enumerate_legal_moves, MoveRecord, Move, Rules, Scoring};
use crate::knowledge::CardKnowledge;

/// Everything `observer` may know: other hands exactly, the public hint
/// record for every hand (own card identities hidden), shared counters and
/// the most recent move. No other history is kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub observer: usize,
    pub num_players: usize,
    pub current_player: usize,
    pub scoring: Scoring,
    pub rules: Rules,
    /// Actual cards per player; `None` for the observer's own hand.
    pub hands: Vec<Option<Vec<Card>>>,
    pub hand_sizes: Vec<usize>,
    pub knowledge: Vec<Vec<CardKnowledge>>,
    pub fireworks: Fireworks,
    pub discard: Vec<Card>,
    pub info_tokens: u8,
    pub lives: u8,
    pub deck_size: usize,
    pub last_move: Option<MoveRecord>,
}

impl Observation {
    /// Legal moves for the observer, assuming it is their turn.
    pub fn legal_moves(&self) -> Vec<Move> {
        enumerate_legal_moves(
            self.observer,
            self.hand_sizes[self.observer],
            |p| self.hands[p].as_deref(),
            self.num_players,
            self.info_tokens,
            &self.rules,
        )
    }

    pub fn own_hand_size(&self) -> usize {
        self.hand_sizes[self.observer]
    }

    pub fn own_knowledge(&self) -> &[CardKnowledge] {
        &self.knowledge[self.observer]
    }

    /// Player index `offset` seats after the observer.
    pub fn player_at_offset(&self, offset: usize) -> usize {
        (self.observer + offset) % self.num_players
    }

    /// Seats after the observer at which `player` sits.
    pub fn offset_of(&self, player: usize) -> usize {
        (player + self.num_players - self.observer) % self.num_players
    }

    pub fn discard_counts(&self) -> CardCounts {
        CardCounts::from_cards(&self.discard)
    }

    pub fn can_discard(&self) -> bool {
        self.rules.discard_at_max_tokens || self.info_tokens < self.rules.max_info_tokens
    }

    pub fn can_hint(&self) -> bool {
        self.info_tokens > 0
    }
}
