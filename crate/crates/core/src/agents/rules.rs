//! Rule primitives.
//!
//! Each rule inspects an [`Observation`] and either proposes a legal move or
//! declines. Policies chain rules in priority order.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::card::{Card, CardCounts};
use crate::engine::{Hint, Move};
use crate::knowledge::{
    is_dead, is_known_playable, is_known_useless, playability_probability, CardKnowledge,
    KnowledgeError, VisibleCounts,
};
use crate::observation::Observation;

/// How much of the available evidence a rule uses when judging its own
/// cards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inference {
    /// Only attributes named by positive hints.
    Positive,
    /// Positive and negative hints.
    Hints,
    /// Hints plus elimination by counting visible copies.
    #[default]
    Full,
}

impl Inference {
    pub fn as_str(self) -> &'static str {
        match self {
            Inference::Positive => "positive",
            Inference::Hints => "hints",
            Inference::Full => "full",
        }
    }
}

impl FromStr for Inference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "positive" => Ok(Inference::Positive),
            "hints" => Ok(Inference::Hints),
            "full" => Ok(Inference::Full),
            _ => Err(format!("unknown inference level {s:?}")),
        }
    }
}

/// How a hint rule chooses between the color and the rank of a card.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HintPreference {
    /// Whichever tells more cards something new (or touches more cards when
    /// partner knowledge is not tracked); ties go to rank.
    #[default]
    MostInformation,
    Rank,
    Color,
    Random,
}

impl HintPreference {
    pub fn as_str(self) -> &'static str {
        match self {
            HintPreference::MostInformation => "most_information",
            HintPreference::Rank => "rank",
            HintPreference::Color => "color",
            HintPreference::Random => "random",
        }
    }
}

impl FromStr for HintPreference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "most_information" => Ok(HintPreference::MostInformation),
            "rank" => Ok(HintPreference::Rank),
            "color" => Ok(HintPreference::Color),
            "random" => Ok(HintPreference::Random),
            _ => Err(format!("unknown hint preference {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleKind {
    /// Play the lowest slot whose every candidate identity is playable.
    PlaySafe { inference: Inference },
    /// Play the slot most likely to be playable if that probability exceeds
    /// `threshold`, provided at least `min_lives` lives remain.
    PlayProbablySafe { threshold: f64, min_lives: u8, inference: Inference },
    /// Once the deck is empty and at least `min_lives` remain, play the most
    /// likely playable card (any nonzero chance).
    PlayBestWhenDeckEmpty { min_lives: u8 },
    /// Discard the lowest slot whose every candidate can no longer score.
    DiscardUseless { inference: Inference },
    DiscardOldest,
    DiscardRandom,
    /// Hint a partner's playable card. With `track_partner_knowledge` the
    /// hint must tell the partner something they do not already know.
    /// `prefer` picks between the color and the rank hint.
    HintPlayable { track_partner_knowledge: bool, prefer: HintPreference },
    /// Hint a partner's useless card, optionally only while fewer than
    /// `max_tokens` info tokens remain.
    HintUseless { max_tokens: Option<u8> },
    /// The hint touching the most cards whose hinted attribute is unknown.
    HintMostInformation,
    HintRandom,
    /// Uniform over every legal move.
    LegalRandom,
}

impl RuleKind {
    /// Name used in policy files.
    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::PlaySafe { .. } => "play_safe",
            RuleKind::PlayProbablySafe { .. } => "play_probably_safe",
            RuleKind::PlayBestWhenDeckEmpty { .. } => "play_best_when_deck_empty",
            RuleKind::DiscardUseless { .. } => "discard_useless",
            RuleKind::DiscardOldest => "discard_oldest",
            RuleKind::DiscardRandom => "discard_random",
            RuleKind::HintPlayable { .. } => "hint_playable",
            RuleKind::HintUseless { .. } => "hint_useless",
            RuleKind::HintMostInformation => "hint_most_information",
            RuleKind::HintRandom => "hint_random",
            RuleKind::LegalRandom => "legal_random",
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            RuleKind::PlayProbablySafe { threshold, .. } if !(0.0..=1.0).contains(&threshold) => {
                Err(format!("threshold {threshold} outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Proposes a move, or `None` when the rule's condition does not hold.
    pub fn try_rule<R: Rng + ?Sized>(
        &self,
        view: &View<'_>,
        rng: &mut R,
    ) -> Result<Option<Move>, KnowledgeError> {
        let obs = view.obs;
        Ok(match *self {
            RuleKind::PlaySafe { inference } => {
                let mut found = None;
                for (slot, k) in obs.own_knowledge().iter().enumerate() {
                    let (k, visible) = view.evidence(k, inference);
                    if is_known_playable(&k, visible, &obs.fireworks)? {
                        found = Some(Move::Play { slot });
                        break;
                    }
                }
                found
            }
            RuleKind::PlayProbablySafe { threshold, min_lives, inference } => {
                if obs.lives < min_lives {
                    return Ok(None);
                }
                view.best_play(inference)?
                    .filter(|&(_, p)| p >= threshold)
                    .map(|(slot, _)| Move::Play { slot })
            }
            RuleKind::PlayBestWhenDeckEmpty { min_lives } => {
                if obs.deck_size == 0 && obs.lives >= min_lives {
                    view.best_play(Inference::Full)?
                        .filter(|&(_, p)| p > 0.0)
                        .map(|(slot, _)| Move::Play { slot })
                } else {
                    None
                }
            }
            RuleKind::DiscardUseless { inference } => {
                let mut found = None;
                if obs.can_discard() {
                    for (slot, k) in obs.own_knowledge().iter().enumerate() {
                        let (k, visible) = view.evidence(k, inference);
                        if is_known_useless(&k, visible, &obs.fireworks, &view.discard)? {
                            found = Some(Move::Discard { slot });
                            break;
                        }
                    }
                }
                found
            }
            RuleKind::DiscardOldest => (obs.can_discard() && obs.own_hand_size() > 0)
                .then_some(Move::Discard { slot: 0 }),
            RuleKind::DiscardRandom => (obs.can_discard() && obs.own_hand_size() > 0)
                .then(|| Move::Discard {
                    slot: rng.random_range(0..obs.own_hand_size()),
                }),
            RuleKind::HintPlayable { track_partner_knowledge, prefer } => {
                if !obs.can_hint() {
                    return Ok(None);
                }
                view.hint_for_cards(
                    |card, _| obs.fireworks.is_playable(card),
                    track_partner_knowledge,
                    prefer,
                    rng,
                )
            }
            RuleKind::HintUseless { max_tokens } => {
                if !obs.can_hint() || max_tokens.is_some_and(|m| obs.info_tokens >= m) {
                    return Ok(None);
                }
                view.hint_for_cards(
                    |card, k| {
                        is_dead(card, &obs.fireworks, &view.discard)
                            && !k.plausible().all(|c| is_dead(c, &obs.fireworks, &view.discard))
                    },
                    true,
                    HintPreference::MostInformation,
                    rng,
                )
            }
            RuleKind::HintMostInformation => {
                if !obs.can_hint() {
                    return Ok(None);
                }
                let mut best: Option<(usize, Move)> = None;
                for offset in 1..obs.num_players {
                    let target = obs.player_at_offset(offset);
                    for hint in hints_rank_first() {
                        let gain = view.new_information(target, hint);
                        if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                            best = Some((gain, Move::Hint { target, hint }));
                        }
                    }
                }
                best.map(|(_, m)| m)
            }
            RuleKind::HintRandom => {
                let hints: Vec<Move> = view
                    .legal_moves()
                    .iter()
                    .copied()
                    .filter(|m| matches!(m, Move::Hint { .. }))
                    .collect();
                hints.choose(rng).copied()
            }
            RuleKind::LegalRandom => view.legal_moves().choose(rng).copied(),
        })
    }
}

/// Rank hints first, then colors; used wherever ties favor rank.
fn hints_rank_first() -> impl Iterator<Item = Hint> {
    (1..=5)
        .map(Hint::Rank)
        .chain(crate::card::Color::ALL.into_iter().map(Hint::Color))
}

/// An observation with the derived quantities every rule needs.
pub struct View<'a> {
    pub obs: &'a Observation,
    pub visible: VisibleCounts,
    pub discard: CardCounts,
    nothing_visible: VisibleCounts,
    legal: std::cell::OnceCell<Vec<Move>>,
}

impl<'a> View<'a> {
    pub fn new(obs: &'a Observation) -> View<'a> {
        View {
            obs,
            visible: VisibleCounts::from_observation(obs),
            discard: obs.discard_counts(),
            nothing_visible: VisibleCounts::default(),
            legal: std::cell::OnceCell::new(),
        }
    }

    /// The knowledge and visible counts a rule at `level` reasons from.
    pub fn evidence(&self, k: &CardKnowledge, level: Inference) -> (CardKnowledge, &VisibleCounts) {
        match level {
            Inference::Positive => (k.positive_only(), &self.nothing_visible),
            Inference::Hints => (*k, &self.nothing_visible),
            Inference::Full => (*k, &self.visible),
        }
    }

    pub fn legal_moves(&self) -> &[Move] {
        self.legal.get_or_init(|| self.obs.legal_moves())
    }

    /// Slot with the highest playability probability (lowest slot on ties).
    pub fn best_play(&self, level: Inference) -> Result<Option<(usize, f64)>, KnowledgeError> {
        let mut best: Option<(usize, f64)> = None;
        for (slot, k) in self.obs.own_knowledge().iter().enumerate() {
            let (k, visible) = self.evidence(k, level);
            let p = playability_probability(&k, visible, &self.obs.fireworks)?;
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((slot, p));
            }
        }
        Ok(best)
    }

    /// Number of cards in `target`'s hand a hint would touch whose hinted
    /// attribute is not yet determined by public knowledge.
    pub fn new_information(&self, target: usize, hint: Hint) -> usize {
        let Some(hand) = self.obs.hands[target].as_deref() else {
            return 0;
        };
        hand.iter()
            .zip(&self.obs.knowledge[target])
            .filter(|(c, k)| hint.matches(**c) && !k.knows_attribute_of(hint))
            .count()
    }

    /// Number of cards a hint touches.
    fn touched(&self, target: usize, hint: Hint) -> usize {
        self.obs.hands[target]
            .as_deref()
            .map_or(0, |h| h.iter().filter(|c| hint.matches(**c)).count())
    }

    /// Walks partners in seating order and their cards by slot; for the first
    /// card matching `wanted` for which a hint can be chosen, returns it.
    ///
    /// With `informative`, only hints adding new information qualify;
    /// `prefer` breaks the remaining choice.
    fn hint_for_cards<R: Rng + ?Sized>(
        &self,
        wanted: impl Fn(Card, &CardKnowledge) -> bool,
        informative: bool,
        prefer: HintPreference,
        rng: &mut R,
    ) -> Option<Move> {
        let obs = self.obs;
        let mut options = Vec::new();
        for offset in 1..obs.num_players {
            let target = obs.player_at_offset(offset);
            let Some(hand) = obs.hands[target].as_deref() else {
                continue;
            };
            for (card, k) in hand.iter().zip(&obs.knowledge[target]) {
                if !wanted(*card, k) {
                    continue;
                }
                let rank = Hint::Rank(card.rank);
                let color = Hint::Color(card.color);
                let (r, c) = if informative {
                    (self.new_information(target, rank), self.new_information(target, color))
                } else {
                    (self.touched(target, rank), self.touched(target, color))
                };
                if r + c == 0 {
                    continue;
                }
                if prefer != HintPreference::Random {
                    let hint = match prefer {
                        _ if c == 0 => rank,
                        _ if r == 0 => color,
                        HintPreference::MostInformation if r >= c => rank,
                        HintPreference::Rank => rank,
                        _ => color,
                    };
                    return Some(Move::Hint { target, hint });
                }
                options.push((target, rank, color, r, c));
            }
        }
        // random preference: a random qualifying card, then a random
        // informative attribute
        let &(target, rank, color, r, c) = options.choose(rng)?;
        let hint = if c == 0 || (r > 0 && rng.random_bool(0.5)) { rank } else { color };
        Some(Move::Hint { target, hint })
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match self {
            RuleKind::PlaySafe { inference } | RuleKind::DiscardUseless { inference } => {
                write!(f, " inference={}", inference.as_str())
            }
            RuleKind::PlayProbablySafe { threshold, min_lives, inference } => {
                write!(f, " threshold={threshold} min_lives={min_lives} inference={}", inference.as_str())
            }
            RuleKind::PlayBestWhenDeckEmpty { min_lives } => write!(f, " min_lives={min_lives}"),
            RuleKind::HintPlayable { track_partner_knowledge, prefer } => {
                write!(f, " track_partner_knowledge={track_partner_knowledge} prefer={}", prefer.as_str())
            }
            RuleKind::HintUseless { max_tokens: Some(m) } => write!(f, " max_tokens={m}"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ParseRuleError(pub String);

impl FromStr for RuleKind {
    type Err = ParseRuleError;

    /// Parses `name key=value ...`.
    fn from_str(line: &str) -> Result<RuleKind, ParseRuleError> {
        let mut words = line.split_whitespace();
        let name = words.next().ok_or_else(|| ParseRuleError("empty rule".into()))?;
        let mut params = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| ParseRuleError(format!("expected key=value, got {w:?}")))?;
            if params.insert(k, v).is_some() {
                return Err(ParseRuleError(format!("duplicate parameter {k:?}")));
            }
        }
        let mut take = |key: &str| params.remove(key);
        fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, ParseRuleError> {
            v.parse()
                .map_err(|_| ParseRuleError(format!("bad value {v:?} for {key}")))
        }
        fn required<'v>(name: &str, key: &str, v: Option<&'v str>) -> Result<&'v str, ParseRuleError> {
            v.ok_or_else(|| ParseRuleError(format!("{name} requires {key}=...")))
        }
        fn inference(v: Option<&str>) -> Result<Inference, ParseRuleError> {
            v.map_or(Ok(Inference::Full), |v| v.parse().map_err(ParseRuleError))
        }
        let rule = match name {
            "play_safe" => RuleKind::PlaySafe {
                inference: inference(take("inference"))?,
            },
            "play_probably_safe" => RuleKind::PlayProbablySafe {
                threshold: parse("threshold", required(name, "threshold", take("threshold"))?)?,
                min_lives: take("min_lives").map(|v| parse("min_lives", v)).transpose()?.unwrap_or(1),
                inference: inference(take("inference"))?,
            },
            "play_best_when_deck_empty" => RuleKind::PlayBestWhenDeckEmpty {
                min_lives: parse("min_lives", required(name, "min_lives", take("min_lives"))?)?,
            },
            "discard_useless" => RuleKind::DiscardUseless {
                inference: inference(take("inference"))?,
            },
            "discard_oldest" => RuleKind::DiscardOldest,
            "discard_random" => RuleKind::DiscardRandom,
            "hint_playable" => RuleKind::HintPlayable {
                track_partner_knowledge: take("track_partner_knowledge")
                    .map(|v| parse("track_partner_knowledge", v))
                    .transpose()?
                    .unwrap_or(true),
                prefer: take("prefer")
                    .map_or(Ok(HintPreference::MostInformation), |v| v.parse().map_err(ParseRuleError))?,
            },
            "hint_useless" => RuleKind::HintUseless {
                max_tokens: take("max_tokens").map(|v| parse("max_tokens", v)).transpose()?,
            },
            "hint_most_information" => RuleKind::HintMostInformation,
            "hint_random" => RuleKind::HintRandom,
            "legal_random" => RuleKind::LegalRandom,
            other => return Err(ParseRuleError(format!("unknown rule {other:?}"))),
        };
        if let Some(k) = params.keys().next() {
            return Err(ParseRuleError(format!("unknown parameter {k:?} for {name}")));
        }
        rule.validate().map_err(ParseRuleError)?;
        Ok(rule)
    }
}
