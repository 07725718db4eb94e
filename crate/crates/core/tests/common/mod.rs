//! Brute-force oracles shared by the integration tests and the acceptance
//! suite. Each returns a report; callers decide what sizes to run.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

use hanabi_core::agents::{preset, Policy};
use hanabi_core::bridge::{encode_observation, encoded_len, WireMove};
use hanabi_core::card::{full_deck, Card, CardCounts, Color};
use hanabi_core::engine::{GameConfig, GameState, Hint, Move, Scoring};
use hanabi_core::knowledge::{playability_probability, CardKnowledge, VisibleCounts};
use hanabi_core::rng::{derive_seed, GameRng};
use hanabi_core::Observation;

pub const MAX_TURNS: u32 = 200;

#[derive(Debug, Default)]
pub struct EngineReport {
    pub games: u64,
    pub moves: u64,
    pub violations: Vec<String>,
}

/// Plays `n_games` games with uniformly random legal moves (2 to 5
/// players) and checks every transition.
pub fn engine_properties(n_games: u64, master_seed: u64) -> EngineReport {
    let mut report = EngineReport::default();
    for i in 0..n_games {
        let seed = derive_seed(master_seed, i);
        let players = 2 + (i % 4) as usize;
        let mut g = GameState::new(GameConfig::new(players, Scoring::Strict, seed)).unwrap();
        let mut rng = GameRng::seed_from_u64(derive_seed(seed, 1));
        let mut fail = |what: String| report.violations.push(format!("game {i}: {what}"));
        if let Err(e) = conserved(&g) {
            fail(e);
        }
        while !g.is_terminal() {
            if g.turn() >= MAX_TURNS {
                fail(format!("still running after {MAX_TURNS} turns"));
                break;
            }
            let before = g.clone();
            let mv = *g.legal_moves().unwrap().choose(&mut rng).unwrap();
            g.apply_move(mv).unwrap();
            report.moves += 1;
            if let Err(e) = conserved(&g) {
                fail(e);
            }
            if let Err(e) = monotone(&before, &g) {
                fail(format!("{mv:?}: {e}"));
            }
        }
        if g.is_terminal() {
            let strict = g.final_score_with(Scoring::Strict).unwrap();
            let lenient = g.final_score_with(Scoring::Lenient).unwrap();
            if strict > lenient {
                fail(format!("strict {strict} > lenient {lenient}"));
            }
            if lenient != g.fireworks_score() {
                fail("lenient score differs from the piles".into());
            }
        }
        report.games += 1;
    }
    report
}

/// Deck, hands, discard and piles together are exactly the 50-card deck.
fn conserved(g: &GameState) -> Result<(), String> {
    let mut counts = CardCounts::default();
    let players = g.config().num_players;
    let held = (0..players).flat_map(|p| g.hand(p).iter());
    for c in g.deck().iter().chain(held).chain(g.discard()) {
        counts.add(*c);
    }
    for color in Color::ALL {
        for r in 1..=g.fireworks().height(color) {
            counts.add(Card::new(color, r));
        }
    }
    if counts != CardCounts::from_cards(&full_deck()) {
        return Err(format!("card multiset changed ({} cards)", counts.total()));
    }
    Ok(())
}

fn monotone(a: &GameState, b: &GameState) -> Result<(), String> {
    for color in Color::ALL {
        if b.fireworks().height(color) < a.fireworks().height(color) {
            return Err(format!("{color:?} pile shrank"));
        }
    }
    if b.fireworks_score() > a.fireworks_score() + 1 {
        return Err("more than one card added to the piles".into());
    }
    if b.lives() > a.lives() || a.lives() - b.lives() > 1 {
        return Err("lives went up or dropped by more than one".into());
    }
    if b.deck().len() > a.deck().len() {
        return Err("deck grew".into());
    }
    if b.discard().len() < a.discard().len() || !b.discard().starts_with(a.discard()) {
        return Err("discard pile lost cards".into());
    }
    if b.info_tokens() > 8 {
        return Err("more than 8 tokens".into());
    }
    if b.turn() != a.turn() + 1 {
        return Err("turn counter skipped".into());
    }
    if b.turns_after_deck_empty() < a.turns_after_deck_empty() {
        return Err("final-round counter went back".into());
    }
    Ok(())
}

#[derive(Debug, Default)]
pub struct OracleReport {
    pub states: usize,
    pub deals: u64,
    pub max_error: f64,
}

/// Compares `playability_probability` with a count over every ordering of
/// the unseen cards into the observer's hand and the deck.
///
/// States come from late positions of agent games (at most `max_unseen`
/// unseen cards). Only the target slot carries hint information, so the
/// set of consistent deals is exactly what the single-card model
/// describes.
pub fn knowledge_oracle(n_states: usize, max_unseen: usize, master_seed: u64) -> OracleReport {
    let mut report = OracleReport::default();
    let agents: Vec<Policy> = ["piers", "iggi", "vdb", "outer"].iter().map(|n| preset(n).unwrap()).collect();
    let mut game = 0u64;
    while report.states < n_states {
        let seed = derive_seed(master_seed, game);
        game += 1;
        let mut rng = GameRng::seed_from_u64(derive_seed(seed, 7));
        let mut g = GameState::new(GameConfig::two_player(seed)).unwrap();
        let pair = [&agents[game as usize % 4], &agents[(game as usize / 4) % 4]];
        while !g.is_terminal() && report.states < n_states {
            let me = g.current_player();
            let unseen_n = g.deck().len() + g.hand(me).len();
            if unseen_n <= max_unseen && !g.hand(me).is_empty() {
                let err = check_one(&g, &mut rng, &mut report.deals);
                report.max_error = report.max_error.max(err);
                report.states += 1;
            }
            let obs = g.observe(me).unwrap();
            let mv = pair[me].decide(&obs, &mut rng).unwrap();
            g.apply_move(mv).unwrap();
        }
    }
    report
}

fn check_one(g: &GameState, rng: &mut GameRng, deals: &mut u64) -> f64 {
    let me = g.current_player();
    let hand = g.hand(me);
    let target = rng.random_range(0..hand.len());
    let truth = hand[target];
    let mut k = CardKnowledge::unknown();
    for _ in 0..rng.random_range(0..4) {
        let hint = *Hint::all().collect::<Vec<_>>().choose(rng).unwrap();
        k.apply_hint(hint, hint.matches(truth));
    }
    let mut obs: Observation = g.observe(me).unwrap();
    for (slot, slot_k) in obs.knowledge[me].iter_mut().enumerate() {
        *slot_k = if slot == target { k } else { CardKnowledge::unknown() };
    }
    let model = playability_probability(&k, &VisibleCounts::from_observation(&obs), &obs.fireworks).unwrap();

    // positions 0..hand.len() are my slots, the rest the deck
    let mut unseen: Vec<Card> = hand.to_vec();
    unseen.extend_from_slice(g.deck());
    let (mut good, mut total) = (0u64, 0u64);
    for_each_permutation(&mut unseen, &mut |deal| {
        let card = deal[target];
        if k.allows(card) {
            total += 1;
            if obs.fireworks.is_playable(card) {
                good += 1;
            }
        }
    });
    *deals += total;
    (model - good as f64 / total as f64).abs()
}

/// Heap's algorithm.
fn for_each_permutation(items: &mut [Card], f: &mut impl FnMut(&[Card])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[derive(Debug, Default)]
pub struct EncoderReport {
    pub states: usize,
    pub wrong_length: usize,
    pub distinct_encodings: usize,
    pub collisions: usize,
    pub mutations: usize,
    pub missed_mutations: usize,
}

/// Everything the encoding promises to carry, relative to the observer.
fn projection(obs: &Observation) -> String {
    let n = obs.num_players;
    let at = |o: usize| obs.player_at_offset(o);
    let hands: Vec<_> = (1..n).map(|o| obs.hands[at(o)].clone()).collect();
    let sizes: Vec<_> = (0..n).map(|o| obs.hand_sizes[at(o)]).collect();
    let knowledge: Vec<Vec<_>> = (0..n)
        .map(|o| {
            obs.knowledge[at(o)]
                .iter()
                .map(|k| (k.possible_colors, k.possible_ranks, k.color_hinted, k.rank_hinted))
                .collect()
        })
        .collect();
    let last = obs.last_move.as_ref().map(|r| {
        (
            obs.offset_of(r.player),
            WireMove::from_move(r.mv, r.player, n),
            r.card,
            r.success,
            r.info_token_added,
            r.touched.clone(),
        )
    });
    format!(
        "{hands:?}|{sizes:?}|{}|{:?}|{}|{}|{:?}|{last:?}|{knowledge:?}",
        obs.deck_size,
        obs.fireworks,
        obs.info_tokens,
        obs.lives,
        obs.discard_counts()
    )
}

/// Samples two-player observations from agent games; checks the encoded
/// length, that equal encodings only come from equal projections, and that
/// single-field changes to an observation always change its encoding.
pub fn encoder_fuzz(n_states: usize, master_seed: u64) -> EncoderReport {
    let mut report = EncoderReport::default();
    let agents: Vec<Policy> = hanabi_core::agents::PRESET_NAMES.iter().map(|n| preset(n).unwrap()).collect();
    let mut seen: HashMap<Vec<u8>, String> = HashMap::new();
    let mut game = 0u64;
    while report.states < n_states {
        let seed = derive_seed(master_seed, game);
        game += 1;
        let mut rng = GameRng::seed_from_u64(derive_seed(seed, 3));
        let mut g = GameState::new(GameConfig::two_player(seed)).unwrap();
        let pair = [&agents[game as usize % 7], &agents[(game as usize / 7) % 7]];
        while !g.is_terminal() && report.states < n_states {
            let me = g.current_player();
            let obs = g.observe(me).unwrap();
            let bits = encode_observation(&obs).0;
            report.states += 1;
            if bits.len() != encoded_len(2) || encoded_len(2) != 658 {
                report.wrong_length += 1;
            }
            let proj = projection(&obs);
            match seen.get(&bits) {
                Some(p) if *p != proj => report.collisions += 1,
                Some(_) => {}
                None => {
                    seen.insert(bits.clone(), proj.clone());
                }
            }
            if let Some(changed) = mutate(&obs, &mut rng) {
                if projection(&changed) != proj {
                    report.mutations += 1;
                    if encode_observation(&changed).0 == bits {
                        report.missed_mutations += 1;
                    }
                }
            }
            let mv = pair[me].decide(&obs, &mut rng).unwrap();
            g.apply_move(mv).unwrap();
        }
    }
    report.distinct_encodings = seen.len();
    report
}

/// One random, possibly unreachable, single-field change.
fn mutate(obs: &Observation, rng: &mut GameRng) -> Option<Observation> {
    let mut o = obs.clone();
    let partner = o.player_at_offset(1);
    match rng.random_range(0..7) {
        0 => o.info_tokens = (o.info_tokens + rng.random_range(1..=8)) % 9,
        1 => o.lives = (o.lives + rng.random_range(1..=3)) % 4,
        2 => o.deck_size = (o.deck_size + rng.random_range(1..=40)) % 41,
        3 => {
            let hand = o.hands[partner].as_mut()?;
            let slot = rng.random_range(0..hand.len().max(1));
            let card = hand.get_mut(slot)?;
            *card = Card::from_index((card.index() + rng.random_range(1..25)) % 25);
        }
        4 => {
            let who = if rng.random_bool(0.5) { partner } else { o.observer };
            let ks = &mut o.knowledge[who];
            let slot = rng.random_range(0..ks.len().max(1));
            let k = ks.get_mut(slot)?;
            let flip = 1u8 << rng.random_range(0..5);
            if rng.random_bool(0.5) {
                k.possible_colors ^= flip;
            } else {
                k.possible_ranks ^= flip;
            }
            if k.possible_colors == 0 || k.possible_ranks == 0 {
                return None;
            }
            k.color_hinted &= k.known_color().is_some();
            k.rank_hinted &= k.known_rank().is_some();
        }
        5 => {
            let card = Card::from_index(rng.random_range(0..25));
            // discard thermometers cap at the number of copies
            if o.discard_counts().get(card) >= card.copies() {
                return None;
            }
            o.discard.push(card);
        }
        _ => {
            let r = o.last_move.as_mut()?;
            match r.mv {
                Move::Play { .. } => r.success = !r.success,
                Move::Discard { slot } => r.mv = Move::Play { slot },
                Move::Hint { target, hint } => {
                    r.mv = Move::Hint {
                        target,
                        hint: match hint {
                            Hint::Color(c) => Hint::Color(Color::ALL[(c.index() + 1) % 5]),
                            Hint::Rank(n) => Hint::Rank(n % 5 + 1),
                        },
                    }
                }
            }
        }
    }
    Some(o)
}
