//! Random number generation.
//!
//! Every game owns one [`GameRng`] (PCG-64 with a 128-bit MCG state). Per-game
//! seeds are derived from a master seed and the game's position in the run,
//! never from scheduling order, so serial and parallel runs agree.

use rand::SeedableRng;

pub type GameRng = rand_pcg::Pcg64Mcg;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `index`-th child of `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Generator for agent decisions and seating in a game seeded with
/// `game_seed`. Kept apart from the deck shuffle stream.
pub fn agent_rng(game_seed: u64) -> GameRng {
    GameRng::seed_from_u64(derive_seed(game_seed, u64::MAX))
}
