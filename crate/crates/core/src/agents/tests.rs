use proptest::prelude::*;
use rand::SeedableRng;

use super::*;
use crate::card::{full_deck, Card, Color, Fireworks};
use crate::engine::{GameConfig, GameState, Hint};
use crate::rng::GameRng;

fn cards(s: &str) -> Vec<Card> {
    s.split_whitespace().map(|c| c.parse().unwrap()).collect()
}

/// Two-player state with the given hands, empty piles and player 0 to move.
fn state(own: &str, partner: &str, tokens: u8, current: usize) -> GameState {
    let own = cards(own);
    let partner = cards(partner);
    let mut deck = full_deck();
    for c in own.iter().chain(&partner) {
        let i = deck.iter().position(|d| d == c).unwrap();
        deck.remove(i);
    }
    GameState::from_parts(
        GameConfig::two_player(0),
        deck,
        vec![own, partner],
        Fireworks::default(),
        vec![],
        tokens,
        3,
        current,
    )
    .unwrap()
}

fn fire(rule: RuleKind, obs: &Observation) -> Option<Move> {
    rule.try_rule(&View::new(obs), &mut GameRng::seed_from_u64(0)).unwrap()
}

#[test]
fn play_safe_after_rank_hint() {
    let mut g = state("R2 Y3 G1 W4 B5", "R3 Y4 G2 W2 B3", 8, 1);
    g.apply_move(Move::Hint { target: 0, hint: Hint::Rank(1) }).unwrap();
    let obs = g.observe(0).unwrap();
    for inference in [Inference::Positive, Inference::Hints, Inference::Full] {
        assert_eq!(fire(RuleKind::PlaySafe { inference }, &obs), Some(Move::Play { slot: 2 }));
    }
}

#[test]
fn play_safe_needs_knowledge() {
    let g = state("R2 Y3 G1 W4 B5", "R3 Y4 G2 W2 B3", 8, 0);
    assert_eq!(fire(RuleKind::PlaySafe { inference: Inference::Full }, &g.observe(0).unwrap()), None);
}

#[test]
fn probable_play_threshold() {
    // unhinted hand, partner shows two 1s: 13/45 for every slot
    let g = state("R2 Y3 G4 W4 B5", "R1 Y1 G2 W2 B3", 8, 0);
    let obs = g.observe(0).unwrap();
    let p = View::new(&obs).best_play(Inference::Full).unwrap().unwrap();
    assert_eq!(p.0, 0);
    assert!((p.1 - 13.0 / 45.0).abs() < 1e-12);
    let rule = |threshold| RuleKind::PlayProbablySafe { threshold, min_lives: 1, inference: Inference::Full };
    assert_eq!(fire(rule(0.25), &obs), Some(Move::Play { slot: 0 }));
    assert_eq!(fire(rule(0.60), &obs), None);
}

#[test]
fn probable_play_life_guard() {
    let mut g = state("R2 Y3 G4 W4 B5", "R1 Y1 G2 W2 B3", 8, 0);
    let guarded = RuleKind::PlayProbablySafe { threshold: 0.25, min_lives: 2, inference: Inference::Full };
    assert!(fire(guarded, &g.observe(0).unwrap()).is_some());
    // R2 and then the partner's B3 misfire
    g.apply_move(Move::Play { slot: 0 }).unwrap();
    g.apply_move(Move::Play { slot: 4 }).unwrap();
    assert_eq!(g.lives(), 1);
    assert_eq!(fire(guarded, &g.observe(0).unwrap()), None);
}

#[test]
fn discard_oldest_respects_token_cap() {
    let full = state("R2 Y3 G4 W4 B5", "R1 Y1 G2 W2 B3", 8, 0);
    assert_eq!(fire(RuleKind::DiscardOldest, &full.observe(0).unwrap()), None);
    let spent = state("R2 Y3 G4 W4 B5", "R1 Y1 G2 W2 B3", 7, 0);
    assert_eq!(fire(RuleKind::DiscardOldest, &spent.observe(0).unwrap()), Some(Move::Discard { slot: 0 }));
}

#[test]
fn discard_useless_after_pile_done() {
    // red pile at 2; my slot 0 is R1
    let own = cards("R1 Y3 G4 W4 B5");
    let partner = cards("Y1 Y1 G2 W2 B3");
    let mut deck = full_deck();
    for c in own.iter().chain(&partner).chain(&cards("R1 R2")) {
        let i = deck.iter().position(|d| d == c).unwrap();
        deck.remove(i);
    }
    let mut g = GameState::from_parts(
        GameConfig::two_player(0),
        deck,
        vec![own, partner],
        Fireworks([2, 0, 0, 0, 0]),
        vec![],
        5,
        3,
        1,
    )
    .unwrap();
    g.apply_move(Move::Hint { target: 0, hint: Hint::Color(Color::Red) }).unwrap();
    let obs = g.observe(0).unwrap();
    // red with rank unknown: R3..R5 still live
    assert_eq!(fire(RuleKind::DiscardUseless { inference: Inference::Full }, &obs), None);
    g.apply_move(Move::Hint { target: 1, hint: Hint::Rank(1) }).unwrap();
    g.apply_move(Move::Hint { target: 0, hint: Hint::Rank(1) }).unwrap();
    let obs = g.observe(0).unwrap();
    for inference in [Inference::Positive, Inference::Full] {
        assert_eq!(fire(RuleKind::DiscardUseless { inference }, &obs), Some(Move::Discard { slot: 0 }));
    }
}

#[test]
fn internal_hints_the_playable_one() {
    let g = state("R2 Y3 G4 W4 B5", "R3 Y4 G2 R1 B3", 8, 0);
    let obs = g.observe(0).unwrap();
    let internal = preset("internal").unwrap();
    for seed in 0..50 {
        let mv = internal.decide(&obs, &mut GameRng::seed_from_u64(seed)).unwrap();
        match mv {
            Move::Hint { target: 1, hint } => assert!(hint.matches(Card::new(Color::Red, 1)), "{mv:?}"),
            other => panic!("expected a hint, got {other:?}"),
        }
    }
}

#[test]
fn iggi_discards_oldest_without_useful_hint() {
    let g = state("R2 Y3 G4 W4 B5", "R3 Y4 G2 W2 B3", 5, 0);
    let obs = g.observe(0).unwrap();
    let mv = preset("iggi").unwrap().decide(&obs, &mut GameRng::seed_from_u64(1)).unwrap();
    assert_eq!(mv, Move::Discard { slot: 0 });
}

#[test]
fn iggi_hints_color_first() {
    let g = state("R2 Y3 G4 W4 B5", "R3 Y4 G2 R1 B3", 5, 0);
    let obs = g.observe(0).unwrap();
    let mv = preset("iggi").unwrap().decide(&obs, &mut GameRng::seed_from_u64(1)).unwrap();
    assert_eq!(mv, Move::Hint { target: 1, hint: Hint::Color(Color::Red) });
}

#[test]
fn most_information_prefers_rank_on_ties() {
    // R1 is the only red and the only 1: both hints tell one card something
    let g = state("R2 Y3 G4 W4 B5", "Y3 Y4 G2 R1 B3", 5, 0);
    let obs = g.observe(0).unwrap();
    let rule = RuleKind::HintPlayable { track_partner_knowledge: true, prefer: HintPreference::MostInformation };
    assert_eq!(fire(rule, &obs), Some(Move::Hint { target: 1, hint: Hint::Rank(1) }));
    // with two reds the color hint informs more cards
    let g = state("R2 Y3 G4 W4 B5", "R3 Y4 G2 R1 B3", 5, 0);
    assert_eq!(
        fire(rule, &g.observe(0).unwrap()),
        Some(Move::Hint { target: 1, hint: Hint::Color(Color::Red) })
    );
}

#[test]
fn tracked_hints_skip_known_attributes() {
    let mut g = state("R2 Y3 G4 W4 B5", "Y3 Y4 G2 R1 B3", 6, 0);
    g.apply_move(Move::Hint { target: 1, hint: Hint::Rank(1) }).unwrap();
    g.apply_move(Move::Hint { target: 0, hint: Hint::Rank(5) }).unwrap();
    let obs = g.observe(0).unwrap();
    let rule = RuleKind::HintPlayable { track_partner_knowledge: true, prefer: HintPreference::Rank };
    // rank already known, so only the color adds anything
    assert_eq!(fire(rule, &obs), Some(Move::Hint { target: 1, hint: Hint::Color(Color::Red) }));
}

#[test]
fn legal_random_stays_legal() {
    let g = state("R2 Y3 G4 W4 B5", "R3 Y4 G2 R1 B3", 5, 0);
    let obs = g.observe(0).unwrap();
    let legal = obs.legal_moves();
    let policy = preset("legal_random").unwrap();
    let mut rng = GameRng::seed_from_u64(3);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..2000 {
        let mv = policy.decide(&obs, &mut rng).unwrap();
        assert!(legal.contains(&mv));
        seen.insert(mv);
    }
    assert_eq!(seen.len(), legal.len());
}

#[test]
fn preset_contents() {
    assert_eq!(preset("legal_random").unwrap().rules(), &[RuleKind::LegalRandom]);
    let vdb = preset("vdb").unwrap();
    assert!(vdb
        .rules()
        .iter()
        .any(|r| matches!(r, RuleKind::PlayProbablySafe { threshold, .. } if *threshold == 0.6)));
    let flawed = preset("flawed").unwrap();
    assert!(flawed
        .rules()
        .iter()
        .any(|r| matches!(r, RuleKind::PlayProbablySafe { threshold, .. } if *threshold == 0.25)));
    assert!(flawed.rules().contains(&RuleKind::HintRandom));
    let piers = preset("piers").unwrap();
    assert_eq!(piers.rules()[0], RuleKind::PlayBestWhenDeckEmpty { min_lives: 2 });
    assert!(piers.rules().contains(&RuleKind::HintUseless { max_tokens: Some(4) }));
    let internal = preset("internal").unwrap();
    assert!(matches!(
        internal.rules()[2],
        RuleKind::HintPlayable { track_partner_knowledge: false, .. }
    ));
    for name in PRESET_NAMES {
        assert_eq!(preset(name).unwrap().name(), name);
    }
    assert_eq!(preset("IGGI").unwrap().name(), "iggi");
    assert_eq!(preset("nobody"), Err(AgentError::UnknownPreset("nobody".into())));
}

#[test]
fn policy_totality_is_checked() {
    let err = Policy::new("x", vec![RuleKind::PlaySafe { inference: Inference::Full }, RuleKind::HintRandom]);
    assert!(matches!(err, Err(AgentError::InvalidPolicy { .. })));
    assert!(Policy::new("x", vec![RuleKind::DiscardOldest, RuleKind::HintRandom]).is_ok());
    let bad = RuleKind::PlayProbablySafe { threshold: 1.5, min_lives: 1, inference: Inference::Full };
    assert!(matches!(
        Policy::new("x", vec![bad, RuleKind::LegalRandom]),
        Err(AgentError::InvalidPolicy { .. })
    ));
}

#[test]
fn policy_file_parsing() {
    let text = "\
# cautious agent
name = cautious
play_safe inference=hints
play_probably_safe threshold=0.8   # rarely fires

hint_playable prefer=color
discard_oldest
hint_random
";
    let p = Policy::parse(text, "default").unwrap();
    assert_eq!(p.name(), "cautious");
    assert_eq!(
        p.rules(),
        &[
            RuleKind::PlaySafe { inference: Inference::Hints },
            RuleKind::PlayProbablySafe { threshold: 0.8, min_lives: 1, inference: Inference::Full },
            RuleKind::HintPlayable { track_partner_knowledge: true, prefer: HintPreference::Color },
            RuleKind::DiscardOldest,
            RuleKind::HintRandom,
        ]
    );
    assert_eq!(Policy::parse("legal_random", "d").unwrap().name(), "d");

    let line_of = |text: &str| match Policy::parse(text, "d") {
        Err(AgentError::Parse { line, .. }) => line,
        other => panic!("{other:?}"),
    };
    assert_eq!(line_of("legal_random\nfly_away"), 2);
    assert_eq!(line_of("play_probably_safe"), 1);
    assert_eq!(line_of("play_probably_safe threshold=high"), 1);
    assert_eq!(line_of("play_safe inference=psychic"), 1);
    assert_eq!(line_of("discard_oldest speed=3"), 1);
    assert_eq!(line_of("hint_useless max_tokens=4 max_tokens=5"), 1);
}

#[test]
fn presets_round_trip_through_text() {
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        assert_eq!(Policy::parse(&p.to_string(), "other").unwrap(), p);
    }
}

#[test]
fn decide_is_deterministic() {
    let g = GameState::new(GameConfig::two_player(11)).unwrap();
    let obs = g.observe(0).unwrap();
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        let a = p.decide(&obs, &mut GameRng::seed_from_u64(5)).unwrap();
        let b = p.decide(&obs, &mut GameRng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

fn inference() -> impl Strategy<Value = Inference> {
    prop_oneof![Just(Inference::Positive), Just(Inference::Hints), Just(Inference::Full)]
}

fn preference() -> impl Strategy<Value = HintPreference> {
    prop_oneof![
        Just(HintPreference::MostInformation),
        Just(HintPreference::Rank),
        Just(HintPreference::Color),
        Just(HintPreference::Random),
    ]
}

fn rule() -> impl Strategy<Value = RuleKind> {
    prop_oneof![
        inference().prop_map(|inference| RuleKind::PlaySafe { inference }),
        (0u32..=100, 1u8..=3, inference()).prop_map(|(t, min_lives, inference)| RuleKind::PlayProbablySafe {
            threshold: t as f64 / 100.0,
            min_lives,
            inference,
        }),
        (1u8..=3).prop_map(|min_lives| RuleKind::PlayBestWhenDeckEmpty { min_lives }),
        inference().prop_map(|inference| RuleKind::DiscardUseless { inference }),
        Just(RuleKind::DiscardOldest),
        Just(RuleKind::DiscardRandom),
        (any::<bool>(), preference()).prop_map(|(track_partner_knowledge, prefer)| RuleKind::HintPlayable {
            track_partner_knowledge,
            prefer
        }),
        proptest::option::of(0u8..=8).prop_map(|max_tokens| RuleKind::HintUseless { max_tokens }),
        Just(RuleKind::HintMostInformation),
        Just(RuleKind::HintRandom),
        Just(RuleKind::LegalRandom),
    ]
}

proptest! {
    #[test]
    fn rule_text_round_trip(r in rule()) {
        prop_assert_eq!(r.to_string().parse::<RuleKind>().unwrap(), r);
    }

    #[test]
    fn policy_text_round_trip(mut rules in proptest::collection::vec(rule(), 0..8), name in "[a-z][a-z0-9_]{0,10}") {
        rules.push(RuleKind::LegalRandom);
        let p = Policy::new(name, rules).unwrap();
        prop_assert_eq!(Policy::parse(&p.to_string(), "x").unwrap(), p);
    }
}
