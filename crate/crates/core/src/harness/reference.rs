//! Published reference scores for the seven rule-based agents (2 players,
//! strict scoring, 1000 games per cell) and the tolerances used to compare a
//! run against them.

use super::CrossPlayMatrix;

/// Self-play means of the reference implementation.
pub const SELF_PLAY: [(&str, f64); 7] = [
    ("iggi", 15.76),
    ("internal", 10.01),
    ("outer", 13.78),
    ("legal_random", 0.00),
    ("vdb", 16.12),
    ("flawed", 0.00),
    ("piers", 17.06),
];

/// Agent order of [`PAIRWISE`].
pub const PAIRWISE_AGENTS: [&str; 7] = ["iggi", "internal", "outer", "legal_random", "vdb", "flawed", "piers"];

/// Pairwise means, symmetric, in [`PAIRWISE_AGENTS`] order.
pub const PAIRWISE: [[f64; 7]; 7] = [
    [15.87, 12.48, 15.25, 0.00, 16.50, 0.15, 16.85],
    [12.48, 10.20, 11.81, 0.00, 13.39, 0.01, 13.67],
    [15.25, 11.81, 13.79, 0.00, 14.85, 0.04, 15.65],
    [0.01, 0.00, 0.00, 0.00, 0.01, 0.00, 0.02],
    [16.50, 13.39, 14.85, 0.01, 16.06, 0.15, 17.23],
    [0.15, 0.01, 0.04, 0.00, 0.15, 0.00, 0.16],
    [16.85, 13.67, 15.65, 0.02, 17.23, 0.16, 16.92],
];

/// Agents whose self-play collapses to zero under strict scoring.
pub const DEGENERATE: [&str; 2] = ["legal_random", "flawed"];

/// Partners counted as strong when bounding Flawed's cells.
pub const STRONG: [&str; 4] = ["iggi", "outer", "vdb", "piers"];

pub fn pairwise_reference(a: &str, b: &str) -> Option<f64> {
    let i = PAIRWISE_AGENTS.iter().position(|x| *x == a)?;
    let j = PAIRWISE_AGENTS.iter().position(|x| *x == b)?;
    Some(PAIRWISE[i][j])
}

/// How a measured value is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    /// `|value - target| <= tol`
    Within { target: f64, tol: f64 },
    /// `value <= max`
    AtMost(f64),
}

impl Bound {
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Bound::Within { target, tol } => (value - target).abs() <= tol,
            Bound::AtMost(max) => value <= max,
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Within { target, tol } => write!(f, "{target:.2} ± {tol:.2}"),
            Bound::AtMost(max) => write!(f, "≤ {max:.2}"),
        }
    }
}

/// Tolerances for the self-play comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfPlayTolerances {
    pub legal_random_max: f64,
    pub flawed_max: f64,
    pub default_tol: f64,
    pub vdb_tol: f64,
}

impl Default for SelfPlayTolerances {
    fn default() -> Self {
        SelfPlayTolerances {
            legal_random_max: 0.05,
            flawed_max: 0.10,
            default_tol: 1.5,
            vdb_tol: 2.5,
        }
    }
}

impl SelfPlayTolerances {
    pub fn bound(&self, agent: &str) -> Option<Bound> {
        let target = SELF_PLAY.iter().find(|(a, _)| *a == agent)?.1;
        Some(match agent {
            "legal_random" => Bound::AtMost(self.legal_random_max),
            "flawed" => Bound::AtMost(self.flawed_max),
            "vdb" => Bound::Within { target, tol: self.vdb_tol },
            _ => Bound::Within { target, tol: self.default_tol },
        })
    }
}

/// Tolerances for the pairwise comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseTolerances {
    /// Cells with a degenerate agent.
    pub degenerate_max: f64,
    /// Flawed paired with a strong partner.
    pub flawed_strong_max: f64,
    /// Cells between two non-degenerate agents.
    pub cell_tol: f64,
}

impl Default for PairwiseTolerances {
    fn default() -> Self {
        PairwiseTolerances {
            degenerate_max: 0.2,
            flawed_strong_max: 0.5,
            cell_tol: 2.0,
        }
    }
}

impl PairwiseTolerances {
    pub fn bound(&self, a: &str, b: &str) -> Option<Bound> {
        let target = pairwise_reference(a, b)?;
        let degenerate = |x: &str| DEGENERATE.contains(&x);
        let strong = |x: &str| STRONG.contains(&x);
        Some(if (a == "flawed" && strong(b)) || (b == "flawed" && strong(a)) {
            Bound::AtMost(self.flawed_strong_max)
        } else if degenerate(a) || degenerate(b) {
            Bound::AtMost(self.degenerate_max)
        } else {
            Bound::Within { target, tol: self.cell_tol }
        })
    }
}

/// One line of a comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: Option<Bound>,
    pub pass: bool,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match &self.bound {
            Some(b) => write!(f, "{verdict}  {:<28} {:>6.2}  (expected {b})", self.label, self.value),
            None => write!(f, "{verdict}  {:<28} {:>6.2}", self.label, self.value),
        }
    }
}

/// Per-agent self-play checks. `means` pairs agent names with measured means.
pub fn check_self_play(means: &[(String, f64)], tol: &SelfPlayTolerances) -> Vec<Check> {
    means
        .iter()
        .filter_map(|(agent, mean)| {
            let bound = tol.bound(agent)?;
            Some(Check {
                label: format!("self-play {agent}"),
                value: *mean,
                bound: Some(bound),
                pass: bound.holds(*mean),
            })
        })
        .collect()
}

/// Cell checks plus the structural orderings: weaker agents gain from
/// stronger partners, and piers has the highest row average.
pub fn check_pairwise(m: &CrossPlayMatrix, tol: &PairwiseTolerances) -> Vec<Check> {
    let mut checks = Vec::new();
    for (i, j) in m.pairs() {
        let (a, b) = (&m.agents[i], &m.agents[j]);
        if let Some(bound) = tol.bound(a, b) {
            let value = m.cell(i, j).mean;
            checks.push(Check {
                label: format!("{a} + {b}"),
                value,
                bound: Some(bound),
                pass: bound.holds(value),
            });
        }
    }
    for (weak, strong) in [("internal", "piers"), ("outer", "iggi")] {
        if let (Some(mixed), Some(own)) = (m.get(weak, strong), m.get(weak, weak)) {
            checks.push(Check {
                label: format!("{weak}+{strong} > {weak}+{weak}"),
                value: mixed.mean - own.mean,
                bound: None,
                pass: mixed.mean > own.mean,
            });
        }
    }
    if let Some(p) = m.index_of("piers") {
        let best = m.row_averages.iter().cloned().fold(f64::MIN, f64::max);
        checks.push(Check {
            label: "piers has top row average".into(),
            value: m.row_averages[p],
            bound: None,
            pass: m.row_averages[p] >= best,
        });
    }
    checks
}
