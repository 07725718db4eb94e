//! Fixed-length binary observation vector.
//!
//! Players are listed relative to the observer (offset 0 is the observer).
//! With `P` players and hand size `H` the sections are, in order:
//!
//! | section | bits | content |
//! |---|---|---|
//! | hands | `(P-1)·H·25` | one-hot identity of each card held by players at offsets 1..P, slot by slot (all zero for an empty slot) |
//! | missing cards | `P` | set when the player at that offset holds fewer than `H` cards |
//! | deck | `50 - P·H` | thermometer: the first `deck_size` bits are set |
//! | fireworks | `25` | per color (R, Y, G, W, B), one-hot of the pile height in 5 bits; height 0 is all zero |
//! | info tokens | `8` | thermometer |
//! | lives | `3` | thermometer |
//! | discard | `50` | per color and rank, a thermometer with one bit per copy (3, 2, 2, 2, 1) |
//! | last mover | `P` | one-hot offset of the player who made the last move |
//! | last move kind | `4` | one-hot: play, discard, color hint, rank hint |
//! | last hint target | `P` | one-hot offset of the hinted player |
//! | last hint color | `5` | one-hot |
//! | last hint rank | `5` | one-hot |
//! | last hint touched | `H` | slots matched by the hint |
//! | last slot | `H` | one-hot slot played or discarded |
//! | last card | `25` | one-hot card played or discarded |
//! | last play success | `1` | |
//! | last token added | `1` | |
//! | knowledge | `P·H·35` | per offset and slot: 25 bits of still-possible identities (color mask × rank mask), 5 bits one-hot hinted color, 5 bits one-hot hinted rank |
//!
//! For two players this is 127 + 76 + 50 + 55 + 350 = 658 bits. Every
//! section before "last mover" is zero-filled when there is no last move.

use serde::{Deserialize, Serialize};

use crate::card::{Card, Color, COPIES_PER_RANK, DECK_SIZE, NUM_COLORS, NUM_RANKS};
use crate::engine::{hand_size_for, Hint, Move};
use crate::observation::Observation;

const IDENTITIES: usize = NUM_COLORS * NUM_RANKS;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodedObservation(pub Vec<u8>);

impl EncodedObservation {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }
}

/// Encoded length for `num_players` players.
pub fn encoded_len(num_players: usize) -> usize {
    let p = num_players;
    let h = hand_size_for(p);
    let hands = (p - 1) * h * IDENTITIES + p;
    let board = (DECK_SIZE - p * h) + NUM_COLORS * NUM_RANKS + 8 + 3;
    let discard = DECK_SIZE;
    let last = p + 4 + p + NUM_COLORS + NUM_RANKS + h + h + IDENTITIES + 2;
    let knowledge = p * h * (IDENTITIES + NUM_COLORS + NUM_RANKS);
    hands + board + discard + last + knowledge
}

struct Writer {
    bits: Vec<u8>,
}

impl Writer {
    /// Appends a zeroed section and returns its start.
    fn section(&mut self, len: usize) -> usize {
        let start = self.bits.len();
        self.bits.resize(start + len, 0);
        start
    }

    fn thermometer(&mut self, len: usize, count: usize) {
        let start = self.section(len);
        self.bits[start..start + count.min(len)].fill(1);
    }

    fn one_hot(&mut self, len: usize, index: Option<usize>) {
        let start = self.section(len);
        if let Some(i) = index {
            self.bits[start + i] = 1;
        }
    }
}

pub fn encode_observation(obs: &Observation) -> EncodedObservation {
    let p = obs.num_players;
    let h = hand_size_for(p);
    let mut w = Writer {
        bits: Vec::with_capacity(encoded_len(p)),
    };

    // hands
    for offset in 1..p {
        let hand = obs.hands[obs.player_at_offset(offset)].as_deref().unwrap_or(&[]);
        for slot in 0..h {
            w.one_hot(IDENTITIES, hand.get(slot).map(|c| c.index()));
        }
    }
    let missing = w.section(p);
    for offset in 0..p {
        if obs.hand_sizes[obs.player_at_offset(offset)] < h {
            w.bits[missing + offset] = 1;
        }
    }

    // board
    w.thermometer(DECK_SIZE - p * h, obs.deck_size);
    for color in Color::ALL {
        let height = obs.fireworks.height(color) as usize;
        w.one_hot(NUM_RANKS, height.checked_sub(1));
    }
    w.thermometer(8, obs.info_tokens as usize);
    w.thermometer(3, obs.lives as usize);

    // discard
    let discard = obs.discard_counts();
    for color in Color::ALL {
        for (r, &copies) in COPIES_PER_RANK.iter().enumerate() {
            w.thermometer(copies as usize, discard.get(Card::new(color, r as u8 + 1)) as usize);
        }
    }

    // last move
    let last = obs.last_move.as_ref();
    w.one_hot(p, last.map(|r| obs.offset_of(r.player)));
    w.one_hot(
        4,
        last.map(|r| match r.mv {
            Move::Play { .. } => 0,
            Move::Discard { .. } => 1,
            Move::Hint { hint: Hint::Color(_), .. } => 2,
            Move::Hint { hint: Hint::Rank(_), .. } => 3,
        }),
    );
    let hint = last.and_then(|r| match r.mv {
        Move::Hint { target, hint } => Some((target, hint)),
        _ => None,
    });
    w.one_hot(p, hint.map(|(t, _)| obs.offset_of(t)));
    w.one_hot(
        NUM_COLORS,
        hint.and_then(|(_, h)| match h {
            Hint::Color(c) => Some(c.index()),
            _ => None,
        }),
    );
    w.one_hot(
        NUM_RANKS,
        hint.and_then(|(_, h)| match h {
            Hint::Rank(r) => Some(r as usize - 1),
            _ => None,
        }),
    );
    let touched = w.section(h);
    for &slot in last.map(|r| r.touched.as_slice()).unwrap_or(&[]) {
        w.bits[touched + slot] = 1;
    }
    w.one_hot(
        h,
        last.and_then(|r| match r.mv {
            Move::Play { slot } | Move::Discard { slot } => Some(slot),
            _ => None,
        }),
    );
    w.one_hot(IDENTITIES, last.and_then(|r| r.card).map(Card::index));
    w.one_hot(1, last.filter(|r| r.success).map(|_| 0));
    w.one_hot(1, last.filter(|r| r.info_token_added).map(|_| 0));

    // knowledge
    for offset in 0..p {
        let knowledge = &obs.knowledge[obs.player_at_offset(offset)];
        for slot in 0..h {
            let start = w.section(IDENTITIES);
            let k = knowledge.get(slot);
            if let Some(k) = k {
                for c in k.plausible() {
                    w.bits[start + c.index()] = 1;
                }
            }
            w.one_hot(
                NUM_COLORS,
                k.filter(|k| k.color_hinted).and_then(|k| k.known_color()).map(Color::index),
            );
            w.one_hot(
                NUM_RANKS,
                k.filter(|k| k.rank_hinted).and_then(|k| k.known_rank()).map(|r| r as usize - 1),
            );
        }
    }

    debug_assert_eq!(w.bits.len(), encoded_len(p));
    EncodedObservation(w.bits)
}
