//! Rule-based agents.
//!
//! A [`Policy`] is an ordered list of [`RuleKind`]s; the first rule that fires
//! decides the move. The seven reference agents are available through
//! [`preset`], and new agents can be described in a small text format (see
//! [`Policy::parse`]).

mod rules;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use rules::{HintPreference, Inference, ParseRuleError, RuleKind, View};

use crate::engine::Move;
use crate::knowledge::KnowledgeError;
use crate::observation::Observation;

/// Names accepted by [`preset`], in the order used for reports.
pub const PRESET_NAMES: [&str; 7] = ["iggi", "internal", "outer", "legal_random", "vdb", "flawed", "piers"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("unknown agent {0:?}")]
    UnknownPreset(String),
    #[error("policy {name:?}: {reason}")]
    InvalidPolicy { name: String, reason: String },
    #[error("policy {0:?}: no rule produced a move")]
    NoRuleFired(String),
    #[error("policy file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    name: String,
    rules: Vec<RuleKind>,
}

impl Policy {
    /// Builds a policy, rejecting rule lists that could run out of moves.
    ///
    /// A list is accepted when it ends in `legal_random`, or when it holds
    /// both an unconditional discard (`discard_oldest`/`discard_random`) and
    /// `hint_random`: with a full token pool a hint is always available, and
    /// otherwise a discard is.
    pub fn new(name: impl Into<String>, rules: Vec<RuleKind>) -> Result<Policy, AgentError> {
        let name = name.into();
        let invalid = |reason: String| AgentError::InvalidPolicy {
            name: name.clone(),
            reason,
        };
        for r in &rules {
            r.validate().map_err(invalid)?;
        }
        let total = rules.contains(&RuleKind::LegalRandom)
            || (rules.contains(&RuleKind::HintRandom)
                && rules
                    .iter()
                    .any(|r| matches!(r, RuleKind::DiscardOldest | RuleKind::DiscardRandom)));
        if !total {
            return Err(invalid(
                "rule list may run out of moves; add legal_random, or hint_random plus an unconditional discard".into(),
            ));
        }
        Ok(Policy { name, rules })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> &[RuleKind] {
        &self.rules
    }

    /// The move of the first rule that fires.
    pub fn decide<R: Rng + ?Sized>(&self, obs: &Observation, rng: &mut R) -> Result<Move, AgentError> {
        let view = View::new(obs);
        for rule in &self.rules {
            if let Some(mv) = rule.try_rule(&view, rng)? {
                return Ok(mv);
            }
        }
        Err(AgentError::NoRuleFired(self.name.clone()))
    }

    /// Parses the policy file format: one rule per line as
    /// `rule_name key=value ...`, `#` comments, blank lines ignored, and an
    /// optional leading `name = ...` line.
    ///
    /// ```text
    /// name = cautious
    /// play_safe
    /// play_probably_safe threshold=0.8
    /// hint_playable track_partner_knowledge=true
    /// discard_oldest
    /// hint_random
    /// ```
    pub fn parse(text: &str, default_name: &str) -> Result<Policy, AgentError> {
        let mut name = default_name.to_string();
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("name") {
                if let Some(value) = rest.trim_start().strip_prefix('=') {
                    name = value.trim().to_string();
                    continue;
                }
            }
            let rule = line.parse::<RuleKind>().map_err(|e| AgentError::Parse {
                line: i + 1,
                reason: e.0,
            })?;
            rules.push(rule);
        }
        Policy::new(name, rules)
    }
}

impl fmt::Display for Policy {
    /// Renders the policy file form accepted by [`Policy::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// One of the seven reference agents.
///
/// Every preset but `legal_random` ends with `hint_random` so that it always
/// has a move when the token pool is full and nothing else fires.
pub fn preset(name: &str) -> Result<Policy, AgentError> {
    use RuleKind::*;
    let rules = match name.to_ascii_lowercase().as_str() {
        "legal_random" => vec![LegalRandom],
        "internal" => vec![
            PlaySafe { inference: Inference::Positive },
            DiscardUseless { inference: Inference::Positive },
            HintPlayable { track_partner_knowledge: false, prefer: HintPreference::Random },
            DiscardRandom,
            HintRandom,
        ],
        "outer" => vec![
            PlaySafe { inference: Inference::Positive },
            DiscardUseless { inference: Inference::Positive },
            HintPlayable { track_partner_knowledge: true, prefer: HintPreference::Color },
            DiscardRandom,
            HintRandom,
        ],
        "iggi" => vec![
            PlaySafe { inference: Inference::Positive },
            HintPlayable { track_partner_knowledge: true, prefer: HintPreference::Color },
            DiscardUseless { inference: Inference::Positive },
            DiscardOldest,
            HintRandom,
        ],
        "vdb" => vec![
            PlaySafe { inference: Inference::Full },
            PlayProbablySafe { threshold: 0.6, min_lives: 2, inference: Inference::Full },
            HintPlayable { track_partner_knowledge: true, prefer: HintPreference::MostInformation },
            HintUseless { max_tokens: None },
            HintMostInformation,
            DiscardUseless { inference: Inference::Full },
            DiscardRandom,
            HintRandom,
        ],
        "piers" => vec![
            PlayBestWhenDeckEmpty { min_lives: 2 },
            PlaySafe { inference: Inference::Full },
            PlayProbablySafe { threshold: 0.6, min_lives: 2, inference: Inference::Full },
            HintPlayable { track_partner_knowledge: true, prefer: HintPreference::MostInformation },
            HintUseless { max_tokens: Some(4) },
            DiscardUseless { inference: Inference::Full },
            DiscardOldest,
            HintRandom,
        ],
        "flawed" => vec![
            PlaySafe { inference: Inference::Full },
            PlayProbablySafe { threshold: 0.25, min_lives: 1, inference: Inference::Full },
            HintRandom,
            DiscardUseless { inference: Inference::Full },
            DiscardRandom,
        ],
        _ => return Err(AgentError::UnknownPreset(name.to_string())),
    };
    Policy::new(name.to_ascii_lowercase(), rules)
}

#[cfg(test)]
mod tests;
