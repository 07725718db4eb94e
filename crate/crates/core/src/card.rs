//! Cards, colors and the standard deck composition.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const NUM_COLORS: usize = 5;
pub const NUM_RANKS: usize = 5;
/// Copies of each rank (1..=5) per color.
pub const COPIES_PER_RANK: [u8; NUM_RANKS] = [3, 2, 2, 2, 1];
pub const DECK_SIZE: usize = 50;
pub const MAX_SCORE: u8 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Yellow,
    Green,
    White,
    Blue,
}

impl Color {
    pub const ALL: [Color; NUM_COLORS] = [
        Color::Red,
        Color::Yellow,
        Color::Green,
        Color::White,
        Color::Blue,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Color> {
        Self::ALL.get(i).copied()
    }

    pub fn letter(self) -> char {
        ['R', 'Y', 'G', 'W', 'B'][self.index()]
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c.to_ascii_uppercase() {
            'R' => Some(Color::Red),
            'Y' => Some(Color::Yellow),
            'G' => Some(Color::Green),
            'W' => Some(Color::White),
            'B' => Some(Color::Blue),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.letter().to_string())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let mut chars = s.chars();
        match (chars.next().and_then(Color::from_letter), chars.next()) {
            (Some(c), None) => Ok(c),
            _ => Err(serde::de::Error::custom(format!("unknown color {s:?}"))),
        }
    }
}

/// A card identity. Ranks are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Card {
    pub color: Color,
    pub rank: u8,
}

impl Card {
    /// Panics if `rank` is outside 1..=5.
    pub fn new(color: Color, rank: u8) -> Card {
        assert!((1..=NUM_RANKS as u8).contains(&rank), "rank {rank} out of range");
        Card { color, rank }
    }

    /// Dense index `color * 5 + (rank - 1)`, in 0..25.
    pub fn index(self) -> usize {
        self.color.index() * NUM_RANKS + (self.rank as usize - 1)
    }

    pub fn from_index(i: usize) -> Card {
        Card::new(Color::ALL[i / NUM_RANKS], (i % NUM_RANKS) as u8 + 1)
    }

    pub fn copies(self) -> u8 {
        COPIES_PER_RANK[self.rank as usize - 1]
    }

    /// All 25 distinct identities in index order.
    pub fn all() -> impl Iterator<Item = Card> {
        (0..NUM_COLORS * NUM_RANKS).map(Card::from_index)
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.color, self.rank)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse card {0:?}")]
pub struct ParseCardError(pub String);

impl FromStr for Card {
    type Err = ParseCardError;

    fn from_str(s: &str) -> Result<Card, ParseCardError> {
        let err = || ParseCardError(s.to_string());
        let mut chars = s.chars();
        let color = chars.next().and_then(Color::from_letter).ok_or_else(err)?;
        let rank = chars.next().and_then(|c| c.to_digit(10)).ok_or_else(err)? as u8;
        if chars.next().is_some() || !(1..=5).contains(&rank) {
            return Err(err());
        }
        Ok(Card::new(color, rank))
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The full 50-card deck in canonical (unshuffled) order.
pub fn full_deck() -> Vec<Card> {
    Card::all()
        .flat_map(|c| std::iter::repeat_n(c, c.copies() as usize))
        .collect()
}

/// Firework pile heights, one per color.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fireworks(pub [u8; NUM_COLORS]);

impl Fireworks {
    pub fn height(&self, color: Color) -> u8 {
        self.0[color.index()]
    }

    pub fn is_playable(&self, card: Card) -> bool {
        self.height(card.color) + 1 == card.rank
    }

    pub fn score(&self) -> u8 {
        self.0.iter().sum()
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(|&h| h as usize == NUM_RANKS)
    }

    pub(crate) fn push(&mut self, color: Color) {
        self.0[color.index()] += 1;
    }
}

/// Per-identity card counts, indexed by [`Card::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CardCounts(pub [u8; NUM_COLORS * NUM_RANKS]);

impl CardCounts {
    pub fn from_cards<'a>(cards: impl IntoIterator<Item = &'a Card>) -> CardCounts {
        let mut counts = CardCounts::default();
        for c in cards {
            counts.add(*c);
        }
        counts
    }

    pub fn get(&self, card: Card) -> u8 {
        self.0[card.index()]
    }

    pub fn add(&mut self, card: Card) {
        self.0[card.index()] += 1;
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }
}
