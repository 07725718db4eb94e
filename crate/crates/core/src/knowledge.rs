//! Per-card belief tracking.
//!
//! [`CardKnowledge`] is the public hint record for one hand slot: which colors
//! and ranks are still possible given every positive and negative hint that
//! slot has received. [`VisibleCounts`] holds the copies of each identity a
//! player can see from their seat. Combining the two by elimination gives the
//! candidate identities of a hidden card and from there the playability and
//! uselessness judgments the rule library is built on.
//!
//! Each slot is judged on its own; no joint inference across the observer's
//! hand is attempted.

use serde::{Deserialize, Serialize};

use crate::card::{Card, CardCounts, Color, Fireworks, NUM_COLORS};
use crate::engine::Hint;
use crate::observation::Observation;

const FULL_MASK: u8 = (1 << NUM_COLORS) - 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KnowledgeError {
    #[error("no candidate identity left for card (colors {colors:05b}, ranks {ranks:05b})")]
    NoCandidates { colors: u8, ranks: u8 },
}

/// Possible colors and ranks of one hand slot, as derived from hints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CardKnowledge {
    /// Bit `i` set when `Color::ALL[i]` is still possible.
    pub possible_colors: u8,
    /// Bit `r - 1` set when rank `r` is still possible.
    pub possible_ranks: u8,
    pub color_hinted: bool,
    pub rank_hinted: bool,
}

impl Default for CardKnowledge {
    fn default() -> Self {
        CardKnowledge::unknown()
    }
}

impl CardKnowledge {
    pub fn unknown() -> CardKnowledge {
        CardKnowledge {
            possible_colors: FULL_MASK,
            possible_ranks: FULL_MASK,
            color_hinted: false,
            rank_hinted: false,
        }
    }

    /// Knowledge fixed to a single identity, as if both attributes were hinted.
    pub fn exact(card: Card) -> CardKnowledge {
        CardKnowledge {
            possible_colors: 1 << card.color.index(),
            possible_ranks: 1 << (card.rank - 1),
            color_hinted: true,
            rank_hinted: true,
        }
    }

    pub fn color_possible(&self, color: Color) -> bool {
        self.possible_colors & (1 << color.index()) != 0
    }

    pub fn rank_possible(&self, rank: u8) -> bool {
        self.possible_ranks & (1 << (rank - 1)) != 0
    }

    pub fn allows(&self, card: Card) -> bool {
        self.color_possible(card.color) && self.rank_possible(card.rank)
    }

    /// The color, if only one remains possible.
    pub fn known_color(&self) -> Option<Color> {
        (self.possible_colors.count_ones() == 1)
            .then(|| Color::ALL[self.possible_colors.trailing_zeros() as usize])
    }

    pub fn known_rank(&self) -> Option<u8> {
        (self.possible_ranks.count_ones() == 1).then(|| self.possible_ranks.trailing_zeros() as u8 + 1)
    }

    /// Whether `hint` names this slot's attribute precisely, i.e. the
    /// attribute is already determined.
    pub fn knows_attribute_of(&self, hint: Hint) -> bool {
        match hint {
            Hint::Color(_) => self.known_color().is_some(),
            Hint::Rank(_) => self.known_rank().is_some(),
        }
    }

    /// Applies a hint to this slot. `touched` says whether the slot's card
    /// matches the hint.
    pub fn apply_hint(&mut self, hint: Hint, touched: bool) {
        match (hint, touched) {
            (Hint::Color(c), true) => {
                self.possible_colors = 1 << c.index();
                self.color_hinted = true;
            }
            (Hint::Color(c), false) => self.possible_colors &= !(1 << c.index()),
            (Hint::Rank(r), true) => {
                self.possible_ranks = 1 << (r - 1);
                self.rank_hinted = true;
            }
            (Hint::Rank(r), false) => self.possible_ranks &= !(1 << (r - 1)),
        }
    }

    /// The same slot with negative hints forgotten: an attribute is either
    /// positively hinted or fully open.
    pub fn positive_only(&self) -> CardKnowledge {
        CardKnowledge {
            possible_colors: if self.color_hinted { self.possible_colors } else { FULL_MASK },
            possible_ranks: if self.rank_hinted { self.possible_ranks } else { FULL_MASK },
            ..*self
        }
    }

    /// Identities allowed by the masks alone, ignoring copy counts.
    pub fn plausible(&self) -> impl Iterator<Item = Card> + '_ {
        Card::all().filter(move |c| self.allows(*c))
    }
}

/// Copies of each identity visible to one player: the other players' hands,
/// the discard pile, and the cards already in the fireworks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VisibleCounts(pub CardCounts);

impl VisibleCounts {
    pub fn from_observation(obs: &Observation) -> VisibleCounts {
        let mut counts = CardCounts::default();
        for hand in obs.hands.iter().flatten() {
            for &c in hand {
                counts.add(c);
            }
        }
        for &c in &obs.discard {
            counts.add(c);
        }
        add_fireworks(&mut counts, &obs.fireworks);
        VisibleCounts(counts)
    }

    pub fn get(&self, card: Card) -> u8 {
        self.0.get(card)
    }
}

fn add_fireworks(counts: &mut CardCounts, fireworks: &Fireworks) {
    for color in Color::ALL {
        for rank in 1..=fireworks.height(color) {
            counts.add(Card::new(color, rank));
        }
    }
}

/// Identities still possible for a hidden card, with the number of unseen
/// copies of each.
pub fn remaining_candidates(
    k: &CardKnowledge,
    visible: &VisibleCounts,
) -> Result<Vec<(Card, u8)>, KnowledgeError> {
    let out: Vec<(Card, u8)> = k
        .plausible()
        .filter_map(|c| {
            let left = c.copies().saturating_sub(visible.get(c));
            (left > 0).then_some((c, left))
        })
        .collect();
    if out.is_empty() {
        return Err(KnowledgeError::NoCandidates {
            colors: k.possible_colors,
            ranks: k.possible_ranks,
        });
    }
    Ok(out)
}

/// Fraction of candidate copies that could be played right now.
pub fn playability_probability(
    k: &CardKnowledge,
    visible: &VisibleCounts,
    fireworks: &Fireworks,
) -> Result<f64, KnowledgeError> {
    let candidates = remaining_candidates(k, visible)?;
    let (mut good, mut total) = (0u32, 0u32);
    for (card, n) in candidates {
        total += n as u32;
        if fireworks.is_playable(card) {
            good += n as u32;
        }
    }
    Ok(good as f64 / total as f64)
}

pub fn is_known_playable(
    k: &CardKnowledge,
    visible: &VisibleCounts,
    fireworks: &Fireworks,
) -> Result<bool, KnowledgeError> {
    Ok(remaining_candidates(k, visible)?
        .iter()
        .all(|(c, _)| fireworks.is_playable(*c)))
}

/// True when `card` can never be added to its pile: either the pile already
/// contains its rank or a lower rank still needed has no copies left outside
/// the discard pile.
pub fn is_dead(card: Card, fireworks: &Fireworks, discard: &CardCounts) -> bool {
    let height = fireworks.height(card.color);
    if height >= card.rank {
        return true;
    }
    (height + 1..card.rank).any(|r| {
        let needed = Card::new(card.color, r);
        discard.get(needed) >= needed.copies()
    })
}

pub fn is_known_useless(
    k: &CardKnowledge,
    visible: &VisibleCounts,
    fireworks: &Fireworks,
    discard: &CardCounts,
) -> Result<bool, KnowledgeError> {
    Ok(remaining_candidates(k, visible)?
        .iter()
        .all(|(c, _)| is_dead(*c, fireworks, discard)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(cards: &[&str]) -> VisibleCounts {
        let cards: Vec<Card> = cards.iter().map(|s| s.parse().unwrap()).collect();
        VisibleCounts(CardCounts::from_cards(&cards))
    }

    fn known(color: Option<Color>, rank: Option<u8>) -> CardKnowledge {
        let mut k = CardKnowledge::unknown();
        if let Some(c) = color {
            k.apply_hint(Hint::Color(c), true);
        }
        if let Some(r) = rank {
            k.apply_hint(Hint::Rank(r), true);
        }
        k
    }

    #[test]
    fn unknown_card_has_all_fifty_copies() {
        let c = remaining_candidates(&CardKnowledge::unknown(), &VisibleCounts::default()).unwrap();
        assert_eq!(c.len(), 25);
        assert_eq!(c.iter().map(|(_, n)| *n as usize).sum::<usize>(), 50);
    }

    #[test]
    fn exact_card_single_candidate() {
        let k = known(Some(Color::Red), Some(5));
        let c = remaining_candidates(&k, &VisibleCounts::default()).unwrap();
        assert_eq!(c, vec![(Card::new(Color::Red, 5), 1)]);
    }

    #[test]
    fn rank_one_with_two_visible() {
        // 15 rank-1 copies in the deck, two of them seen.
        let k = known(None, Some(1));
        let c = remaining_candidates(&k, &counts(&["R1", "G1"])).unwrap();
        assert_eq!(c.iter().map(|(_, n)| *n as u32).sum::<u32>(), 13);
    }

    #[test]
    fn exhausted_candidates_is_an_error() {
        let k = known(Some(Color::Blue), Some(5));
        assert!(matches!(
            remaining_candidates(&k, &counts(&["B5"])),
            Err(KnowledgeError::NoCandidates { .. })
        ));
    }

    #[test]
    fn probabilities() {
        let empty = Fireworks::default();
        let p = playability_probability(&known(None, Some(1)), &VisibleCounts::default(), &empty).unwrap();
        assert_eq!(p, 1.0);

        let fw = Fireworks([3, 0, 0, 0, 0]);
        let p = playability_probability(&known(Some(Color::Red), Some(5)), &VisibleCounts::default(), &fw)
            .unwrap();
        assert_eq!(p, 0.0);

        // Game start, two rank-1 cards in partner's hand.
        let v = counts(&["R1", "Y1", "G3", "W4", "B2"]);
        let p = playability_probability(&CardKnowledge::unknown(), &v, &empty).unwrap();
        assert!((p - 13.0 / 45.0).abs() < 1e-12);
    }

    #[test]
    fn known_playable_cases() {
        let v = VisibleCounts::default();
        assert!(is_known_playable(&known(Some(Color::Green), Some(1)), &v, &Fireworks::default()).unwrap());
        assert!(is_known_playable(&known(None, Some(2)), &v, &Fireworks([1; 5])).unwrap());
        assert!(!is_known_playable(&known(None, Some(2)), &v, &Fireworks([1, 0, 0, 0, 0])).unwrap());
    }

    #[test]
    fn elimination_makes_card_playable() {
        // Rank 2 with piles {R:1}: only R2 is playable, but if both copies of
        // every other 2 are visible the card must be R2.
        let v = counts(&["Y2", "Y2", "G2", "G2", "W2", "W2", "B2", "B2"]);
        let k = known(None, Some(2));
        assert!(is_known_playable(&k, &v, &Fireworks([1, 0, 0, 0, 0])).unwrap());
    }

    #[test]
    fn known_useless_cases() {
        let v = VisibleCounts::default();
        let none = CardCounts::default();
        assert!(is_known_useless(&known(None, Some(1)), &v, &Fireworks([1; 5]), &none).unwrap());

        let b3 = Card::new(Color::Blue, 3);
        let discard = CardCounts::from_cards(&[b3, b3]);
        assert!(is_known_useless(&known(Some(Color::Blue), Some(4)), &v, &Fireworks::default(), &discard)
            .unwrap());

        assert!(!is_known_useless(&CardKnowledge::unknown(), &v, &Fireworks::default(), &none).unwrap());
    }

    #[test]
    fn negative_hints_clear_bits() {
        let mut k = CardKnowledge::unknown();
        k.apply_hint(Hint::Rank(1), false);
        k.apply_hint(Hint::Color(Color::Red), false);
        assert!(!k.rank_possible(1));
        assert!(!k.color_possible(Color::Red));
        assert!(!k.color_hinted && !k.rank_hinted);
        k.apply_hint(Hint::Rank(3), true);
        assert_eq!(k.known_rank(), Some(3));
        assert!(k.rank_hinted);
    }
}
