use serde::{Deserialize, Serialize};

use crate::card::MAX_SCORE;

const BINS: usize = MAX_SCORE as usize + 1;

/// Summary of the scores of one pairing.
///
/// Everything is computed from the score histogram, so the result does not
/// depend on the order in which games finished.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingStats {
    pub n: u64,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 when n = 1.
    pub sd: f64,
    /// Standard error of the mean, `sd / sqrt(n)`.
    pub sem: f64,
    /// Games per final score 0..=25.
    pub score_histogram: Vec<u64>,
}

impl PairingStats {
    /// Panics on an empty slice or on scores above 25.
    pub fn from_scores(scores: &[u8]) -> PairingStats {
        let mut hist = [0u64; BINS];
        for &s in scores {
            hist[s as usize] += 1;
        }
        PairingStats::from_histogram(hist)
    }

    pub fn from_histogram(hist: [u64; BINS]) -> PairingStats {
        let n: u64 = hist.iter().sum();
        assert!(n > 0, "no games");
        let sum: u64 = hist.iter().enumerate().map(|(s, &c)| s as u64 * c).sum();
        let mean = sum as f64 / n as f64;
        let ss: f64 = hist
            .iter()
            .enumerate()
            .map(|(s, &c)| c as f64 * (s as f64 - mean).powi(2))
            .sum();
        let sd = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
        PairingStats {
            n,
            mean,
            sd,
            sem: sd / (n as f64).sqrt(),
            score_histogram: hist.to_vec(),
        }
    }

    /// Pools two samples of the same pairing.
    pub fn merge(&self, other: &PairingStats) -> PairingStats {
        let mut hist = [0u64; BINS];
        for (i, h) in hist.iter_mut().enumerate() {
            *h = self.score_histogram[i] + other.score_histogram[i];
        }
        PairingStats::from_histogram(hist)
    }

    pub fn zero_fraction(&self) -> f64 {
        self.score_histogram[0] as f64 / self.n as f64
    }
}
