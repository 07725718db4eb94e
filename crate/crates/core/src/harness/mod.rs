//! Monte-Carlo evaluation: single games, pairings and cross-play matrices.
//!
//! Games are independent and are the unit of parallel work. Each game's seed
//! is derived from the run's master seed and the game's position, so the
//! results are identical whichever [`Execution`] mode runs them.

mod matrix;
pub mod reference;
mod report;
mod runner;
mod stats;

pub use matrix::{cross_play, CrossPlayMatrix};
pub use report::{render_csv, render_json, render_markdown, render_table};
pub use runner::{
    pairing_scores, play_policies, run_game, run_pairing, GameResult, GameSpec, HarnessError, MatchConfig,
    PolicySeat, Seat, SeatError,
};
pub use stats::PairingStats;

/// How independent games are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon worker pool; `None` uses the global pool. Falls back to
    /// sequential execution when built without the `parallel` feature.
    #[default]
    Parallel,
    ParallelWith(usize),
}

impl Execution {
    /// Worker count as given on a command line: 1 means sequential, 0 means
    /// the default pool size.
    pub fn from_jobs(jobs: usize) -> Execution {
        match jobs {
            0 => Execution::Parallel,
            1 => Execution::Sequential,
            n => Execution::ParallelWith(n),
        }
    }

    /// Evaluates `f(0..n)` and returns the results in index order, or the
    /// error of the lowest failing index.
    pub fn map_indexed<T, E, F>(self, n: u64, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(u64) -> Result<T, E> + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => par_map(n, &f),
            #[cfg(feature = "parallel")]
            Execution::ParallelWith(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => pool.install(|| par_map(n, &f)),
                Err(e) => {
                    log::warn!("could not build a {jobs}-thread pool ({e}); running on the global pool");
                    par_map(n, &f)
                }
            },
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel | Execution::ParallelWith(_) => (0..n).map(f).collect(),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, E, F>(n: u64, f: &F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    use rayon::prelude::*;
    // Collect everything first so the reported error is the lowest index
    // regardless of scheduling.
    let results: Vec<Result<T, E>> = (0..n).into_par_iter().map(f).collect();
    results.into_iter().collect()
}
