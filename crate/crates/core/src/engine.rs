//! The Hanabi state machine.
//!
//! A [`GameState`] holds the complete hidden-information state of one game.
//! It only changes through [`GameState::apply_move`]; every other operation is
//! a read. Hand slots use a left-shift-on-removal convention: removing a card
//! shifts the slots above it down by one and the replacement card is appended
//! at the highest index, so slot 0 always holds the oldest card.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::card::{full_deck, Card, CardCounts, Color, Fireworks};
use crate::knowledge::CardKnowledge;
use crate::observation::Observation;
use crate::rng::GameRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scoring {
    /// Losing every life scores zero.
    #[default]
    Strict,
    /// The fireworks total is kept even when every life is lost.
    Lenient,
}

impl std::str::FromStr for Scoring {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(Scoring::Strict),
            "lenient" => Ok(Scoring::Lenient),
            _ => Err(format!("unknown scoring scheme {s:?} (expected strict or lenient)")),
        }
    }
}

/// Rule toggles where common implementations disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rules {
    pub max_info_tokens: u8,
    pub max_lives: u8,
    /// Allow discarding while the token pool is full.
    pub discard_at_max_tokens: bool,
    /// Allow hints that touch no card.
    pub empty_hints: bool,
    /// Completing a pile returns one info token (if the pool is not full).
    pub refund_on_five: bool,
}

impl Default for Rules {
    fn default() -> Self {
        Rules {
            max_info_tokens: 8,
            max_lives: 3,
            discard_at_max_tokens: false,
            empty_hints: false,
            refund_on_five: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameConfig {
    pub num_players: usize,
    pub scoring: Scoring,
    pub seed: u64,
    pub rules: Rules,
}

impl GameConfig {
    pub fn new(num_players: usize, scoring: Scoring, seed: u64) -> GameConfig {
        GameConfig {
            num_players,
            scoring,
            seed,
            rules: Rules::default(),
        }
    }

    pub fn two_player(seed: u64) -> GameConfig {
        GameConfig::new(2, Scoring::Strict, seed)
    }

    pub fn hand_size(&self) -> usize {
        hand_size_for(self.num_players)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(2..=5).contains(&self.num_players) {
            return Err(EngineError::InvalidConfig(format!(
                "num_players must be 2..=5, got {}",
                self.num_players
            )));
        }
        if self.rules.max_info_tokens == 0 || self.rules.max_lives == 0 {
            return Err(EngineError::InvalidConfig(
                "max_info_tokens and max_lives must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn hand_size_for(num_players: usize) -> usize {
    if num_players <= 3 {
        5
    } else {
        4
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hint {
    Color(Color),
    Rank(u8),
}

impl Hint {
    pub fn matches(self, card: Card) -> bool {
        match self {
            Hint::Color(c) => card.color == c,
            Hint::Rank(r) => card.rank == r,
        }
    }

    /// All ten hint contents, colors first.
    pub fn all() -> impl Iterator<Item = Hint> {
        Color::ALL
            .into_iter()
            .map(Hint::Color)
            .chain((1..=5).map(Hint::Rank))
    }
}

/// A move by the current player. Hint targets are absolute player indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    Play { slot: usize },
    Discard { slot: usize },
    Hint { target: usize, hint: Hint },
}

/// What happened on one turn; the only history exposed to observers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveRecord {
    pub player: usize,
    #[serde(rename = "move")]
    pub mv: Move,
    /// Card played or discarded.
    pub card: Option<Card>,
    /// The play was legal for the pile and added a card to it.
    pub success: bool,
    /// The move returned an info token (discard or completed pile).
    pub info_token_added: bool,
    /// Slots of the hinted hand matched by a hint, in ascending order.
    pub touched: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("the game is over")]
    GameOver,
    #[error("the game is not over yet")]
    NotTerminal,
    #[error("illegal move {mv:?} for player {player}: {reason}")]
    IllegalMove { player: usize, mv: Move, reason: String },
    #[error("no such player {0}")]
    InvalidPlayer(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    config: GameConfig,
    /// Draw pile; the next card drawn is the last element.
    deck: Vec<Card>,
    hands: Vec<Vec<Card>>,
    knowledge: Vec<Vec<CardKnowledge>>,
    fireworks: Fireworks,
    discard: Vec<Card>,
    info_tokens: u8,
    lives: u8,
    current_player: usize,
    turn: u32,
    turns_after_deck_empty: usize,
    last_move: Option<MoveRecord>,
    terminal: bool,
}

impl GameState {
    /// Shuffles a fresh deck with a generator seeded from `config.seed` and
    /// deals each player in turn order, one card at a time.
    pub fn new(config: GameConfig) -> Result<GameState, EngineError> {
        config.validate()?;
        let mut deck = full_deck();
        let mut rng = GameRng::seed_from_u64(config.seed);
        deck.shuffle(&mut rng);
        let n = config.num_players;
        let mut hands = vec![Vec::with_capacity(config.hand_size()); n];
        for _ in 0..config.hand_size() {
            for hand in hands.iter_mut() {
                hand.push(deck.pop().expect("deck holds enough cards to deal"));
            }
        }
        Ok(GameState {
            config,
            deck,
            knowledge: vec![vec![CardKnowledge::unknown(); config.hand_size()]; n],
            hands,
            fireworks: Fireworks::default(),
            discard: Vec::new(),
            info_tokens: config.rules.max_info_tokens,
            lives: config.rules.max_lives,
            current_player: 0,
            turn: 0,
            turns_after_deck_empty: 0,
            last_move: None,
            terminal: false,
        })
    }

    /// Builds a state from explicit parts, for tests and fixtures. The deck is
    /// drawn from its end. Fails if cards are not conserved or counts are out
    /// of range.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        config: GameConfig,
        deck: Vec<Card>,
        hands: Vec<Vec<Card>>,
        fireworks: Fireworks,
        discard: Vec<Card>,
        info_tokens: u8,
        lives: u8,
        current_player: usize,
    ) -> Result<GameState, EngineError> {
        config.validate()?;
        if hands.len() != config.num_players || current_player >= config.num_players {
            return Err(EngineError::InvalidConfig("hand count does not match players".into()));
        }
        if info_tokens > config.rules.max_info_tokens || lives > config.rules.max_lives {
            return Err(EngineError::InvalidConfig("token or life count out of range".into()));
        }
        let mut counts = CardCounts::from_cards(deck.iter().chain(hands.iter().flatten()).chain(&discard));
        for color in Color::ALL {
            for rank in 1..=fireworks.height(color) {
                counts.add(Card::new(color, rank));
            }
        }
        if counts != CardCounts::from_cards(&full_deck()) {
            return Err(EngineError::InvalidConfig("cards are not conserved".into()));
        }
        let knowledge = hands
            .iter()
            .map(|h| vec![CardKnowledge::unknown(); h.len()])
            .collect();
        let mut state = GameState {
            config,
            deck,
            hands,
            knowledge,
            fireworks,
            discard,
            info_tokens,
            lives,
            current_player,
            turn: 0,
            turns_after_deck_empty: 0,
            last_move: None,
            terminal: false,
        };
        state.terminal = state.check_terminal();
        Ok(state)
    }

    /// Overwrites the public knowledge of one hand, for fixtures.
    pub fn set_knowledge(&mut self, player: usize, knowledge: Vec<CardKnowledge>) {
        assert_eq!(knowledge.len(), self.hands[player].len());
        self.knowledge[player] = knowledge;
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }
    pub fn deck(&self) -> &[Card] {
        &self.deck
    }
    pub fn hand(&self, player: usize) -> &[Card] {
        &self.hands[player]
    }
    pub fn knowledge(&self, player: usize) -> &[CardKnowledge] {
        &self.knowledge[player]
    }
    pub fn fireworks(&self) -> &Fireworks {
        &self.fireworks
    }
    pub fn discard(&self) -> &[Card] {
        &self.discard
    }
    pub fn info_tokens(&self) -> u8 {
        self.info_tokens
    }
    pub fn lives(&self) -> u8 {
        self.lives
    }
    pub fn current_player(&self) -> usize {
        self.current_player
    }
    /// Moves applied so far.
    pub fn turn(&self) -> u32 {
        self.turn
    }
    pub fn turns_after_deck_empty(&self) -> usize {
        self.turns_after_deck_empty
    }
    pub fn last_move(&self) -> Option<&MoveRecord> {
        self.last_move.as_ref()
    }
    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// Sum of pile heights, regardless of lives.
    pub fn fireworks_score(&self) -> u8 {
        self.fireworks.score()
    }

    /// Total card count across deck, hands, discard and fireworks.
    pub fn card_total(&self) -> usize {
        self.deck.len()
            + self.hands.iter().map(Vec::len).sum::<usize>()
            + self.discard.len()
            + self.fireworks.score() as usize
    }

    pub fn legal_moves(&self) -> Result<Vec<Move>, EngineError> {
        if self.terminal {
            return Err(EngineError::GameOver);
        }
        let me = self.current_player;
        Ok(enumerate_legal_moves(
            me,
            self.hands[me].len(),
            |p| Some(self.hands[p].as_slice()),
            self.config.num_players,
            self.info_tokens,
            &self.config.rules,
        ))
    }

    /// Checks `mv` against the rules without enumerating every legal move.
    pub fn check_move(&self, mv: Move) -> Result<(), EngineError> {
        if self.terminal {
            return Err(EngineError::GameOver);
        }
        let player = self.current_player;
        let illegal = |reason: &str| EngineError::IllegalMove {
            player,
            mv,
            reason: reason.to_string(),
        };
        let hand_len = self.hands[player].len();
        let rules = &self.config.rules;
        match mv {
            Move::Play { slot } if slot >= hand_len => Err(illegal("slot out of range")),
            Move::Discard { slot } if slot >= hand_len => Err(illegal("slot out of range")),
            Move::Discard { .. } if !rules.discard_at_max_tokens && self.info_tokens >= rules.max_info_tokens => {
                Err(illegal("discarding is not allowed with a full token pool"))
            }
            Move::Hint { target, .. } if target == player || target >= self.config.num_players => {
                Err(illegal("bad hint target"))
            }
            Move::Hint { .. } if self.info_tokens == 0 => Err(illegal("no info tokens left")),
            Move::Hint { target, hint } => {
                if let Hint::Rank(r) = hint {
                    if !(1..=5).contains(&r) {
                        return Err(illegal("rank out of range"));
                    }
                }
                if !rules.empty_hints && !self.hands[target].iter().any(|c| hint.matches(*c)) {
                    return Err(illegal("hint touches no card"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Applies a move in place. An illegal move leaves the state untouched.
    pub fn apply_move(&mut self, mv: Move) -> Result<&MoveRecord, EngineError> {
        self.check_move(mv)?;
        let player = self.current_player;
        let deck_was_empty = self.deck.is_empty();
        let max_tokens = self.config.rules.max_info_tokens;
        let mut record = MoveRecord {
            player,
            mv,
            card: None,
            success: false,
            info_token_added: false,
            touched: Vec::new(),
        };

        match mv {
            Move::Play { slot } => {
                let card = self.take_card(player, slot);
                record.card = Some(card);
                if self.fireworks.is_playable(card) {
                    self.fireworks.push(card.color);
                    record.success = true;
                    if card.rank == 5 && self.config.rules.refund_on_five && self.info_tokens < max_tokens {
                        self.info_tokens += 1;
                        record.info_token_added = true;
                    }
                } else {
                    self.discard.push(card);
                    self.lives -= 1;
                }
                self.draw(player);
            }
            Move::Discard { slot } => {
                let card = self.take_card(player, slot);
                record.card = Some(card);
                self.discard.push(card);
                if self.info_tokens < max_tokens {
                    self.info_tokens += 1;
                    record.info_token_added = true;
                }
                self.draw(player);
            }
            Move::Hint { target, hint } => {
                self.info_tokens -= 1;
                for (slot, (card, k)) in self.hands[target]
                    .iter()
                    .zip(self.knowledge[target].iter_mut())
                    .enumerate()
                {
                    let touched = hint.matches(*card);
                    k.apply_hint(hint, touched);
                    if touched {
                        record.touched.push(slot);
                    }
                }
            }
        }

        if deck_was_empty {
            self.turns_after_deck_empty += 1;
        }
        self.turn += 1;
        self.current_player = (player + 1) % self.config.num_players;
        self.last_move = Some(record);
        self.terminal = self.check_terminal();
        Ok(self.last_move.as_ref().expect("just set"))
    }

    /// Score of a finished game under the configured scheme.
    pub fn final_score(&self) -> Result<u8, EngineError> {
        self.final_score_with(self.config.scoring)
    }

    pub fn final_score_with(&self, scoring: Scoring) -> Result<u8, EngineError> {
        if !self.terminal {
            return Err(EngineError::NotTerminal);
        }
        Ok(match scoring {
            Scoring::Strict if self.lives == 0 => 0,
            _ => self.fireworks.score(),
        })
    }

    /// The game as seen from `player`'s seat.
    pub fn observe(&self, player: usize) -> Result<Observation, EngineError> {
        if player >= self.config.num_players {
            return Err(EngineError::InvalidPlayer(player));
        }
        Ok(Observation {
            observer: player,
            num_players: self.config.num_players,
            current_player: self.current_player,
            scoring: self.config.scoring,
            rules: self.config.rules,
            hands: self
                .hands
                .iter()
                .enumerate()
                .map(|(p, h)| (p != player).then(|| h.clone()))
                .collect(),
            hand_sizes: self.hands.iter().map(Vec::len).collect(),
            knowledge: self.knowledge.clone(),
            fireworks: self.fireworks,
            discard: self.discard.clone(),
            info_tokens: self.info_tokens,
            lives: self.lives,
            deck_size: self.deck.len(),
            last_move: self.last_move.clone(),
        })
    }

    fn take_card(&mut self, player: usize, slot: usize) -> Card {
        self.knowledge[player].remove(slot);
        self.hands[player].remove(slot)
    }

    fn draw(&mut self, player: usize) {
        if let Some(card) = self.deck.pop() {
            self.hands[player].push(card);
            self.knowledge[player].push(CardKnowledge::unknown());
        }
    }

    fn check_terminal(&self) -> bool {
        self.lives == 0
            || self.fireworks.is_complete()
            || self.turns_after_deck_empty >= self.config.num_players
    }
}

/// Legal moves for `actor` in canonical order: plays by slot, discards by
/// slot, then hints by target (in seating order after the actor), colors
/// before ranks.
pub(crate) fn enumerate_legal_moves<'a>(
    actor: usize,
    own_hand_len: usize,
    hand_of: impl Fn(usize) -> Option<&'a [Card]>,
    num_players: usize,
    info_tokens: u8,
    rules: &Rules,
) -> Vec<Move> {
    let mut moves: Vec<Move> = (0..own_hand_len).map(|slot| Move::Play { slot }).collect();
    if rules.discard_at_max_tokens || info_tokens < rules.max_info_tokens {
        moves.extend((0..own_hand_len).map(|slot| Move::Discard { slot }));
    }
    if info_tokens > 0 {
        for offset in 1..num_players {
            let target = (actor + offset) % num_players;
            let hand = hand_of(target).unwrap_or(&[]);
            for hint in Hint::all() {
                if rules.empty_hints || hand.iter().any(|c| hint.matches(*c)) {
                    moves.push(Move::Hint { target, hint });
                }
            }
        }
    }
    moves
}
