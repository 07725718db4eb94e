use serde::{Deserialize, Serialize};

use crate::agents::Policy;
use crate::engine::Scoring;
use crate::rng::derive_seed;

use super::runner::{play_policies, GameSpec, HarnessError};
use super::{Execution, PairingStats};

/// Mean scores for every pairing of an agent pool.
///
/// Pairings are unordered (seating is randomized per game), so
/// `cell(i, j)` and `cell(j, i)` are the same sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossPlayMatrix {
    pub agents: Vec<String>,
    pub n_games: u64,
    pub master_seed: u64,
    /// Row-major `agents.len()²` cells, mirrored across the diagonal.
    pub cells: Vec<PairingStats>,
    /// Mean of each row's cell means, diagonal included.
    pub row_averages: Vec<f64>,
}

impl CrossPlayMatrix {
    pub fn cell(&self, i: usize, j: usize) -> &PairingStats {
        &self.cells[i * self.agents.len() + j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    /// Cell looked up by agent names.
    pub fn get(&self, a: &str, b: &str) -> Option<&PairingStats> {
        Some(self.cell(self.index_of(a)?, self.index_of(b)?))
    }

    /// Unordered pairs `(i, j)` with `i <= j`, in row order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        unordered_pairs(self.agents.len())
    }
}

fn unordered_pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (i..k).map(move |j| (i, j)))
}

/// Evaluates every unordered pairing of `agents`, self-pairings included.
///
/// Pairing `p` (in [`CrossPlayMatrix::pairs`] order) uses master seed
/// `derive_seed(master_seed, p)`, and its game `g` uses
/// `derive_seed(that, g)`. All games of all pairings share one work queue.
pub fn cross_play(
    agents: &[Policy],
    n_games: u64,
    master_seed: u64,
    scoring: Scoring,
    exec: Execution,
) -> Result<CrossPlayMatrix, HarnessError> {
    if agents.is_empty() {
        return Err(HarnessError::InvalidConfig("no agents".into()));
    }
    if n_games == 0 {
        return Err(HarnessError::InvalidConfig("n_games must be at least 1".into()));
    }
    let k = agents.len();
    let pairs: Vec<(usize, usize)> = unordered_pairs(k).collect();
    let total = pairs.len() as u64 * n_games;
    let scores = exec.map_indexed(total, |task| {
        let p = task / n_games;
        let g = task % n_games;
        let (i, j) = pairs[p as usize];
        play_policies(
            &[&agents[i], &agents[j]],
            GameSpec {
                game_id: g,
                seed: derive_seed(derive_seed(master_seed, p), g),
                scoring,
                record_trace: false,
            },
        )
        .map(|r| r.score)
    })?;

    let mut cells = vec![None; k * k];
    for (p, &(i, j)) in pairs.iter().enumerate() {
        let chunk = &scores[p * n_games as usize..(p + 1) * n_games as usize];
        let stats = PairingStats::from_scores(chunk);
        cells[j * k + i] = Some(stats.clone());
        cells[i * k + j] = Some(stats);
    }
    let cells: Vec<PairingStats> = cells.into_iter().map(|c| c.expect("every cell filled")).collect();
    let row_averages = (0..k)
        .map(|i| (0..k).map(|j| cells[i * k + j].mean).sum::<f64>() / k as f64)
        .collect();
    Ok(CrossPlayMatrix {
        agents: agents.iter().map(|a| a.name().to_string()).collect(),
        n_games,
        master_seed,
        cells,
        row_averages,
    })
}
