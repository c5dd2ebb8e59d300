//! Translation-quality metrics and score classification.
//!
//! All five metrics operate on sentence pairs: the word-level edit family
//! (Levenshtein, TER), fuzzy string similarity, n-gram overlap (BLEU) and
//! character F-score (chrF++). COMET-style neural scores are obtained
//! through the [`external`] adapter; the neural model itself is out of
//! scope. Every function here is pure and reentrant.

mod bleu;
mod chrf;
mod classify;
mod edit;
pub mod external;
mod ter;
mod tokenize;

pub use bleu::{bleu, bleu_corpus};
pub use chrf::chrf_pp;
pub use classify::{classify, MetricRatings, Rating};
pub use edit::{fuzz_ratio, levenshtein, levenshtein_str};
pub use external::{ExternalScorer, ScorerError};
pub use ter::ter;
pub use tokenize::{extract_ngrams, tokenize, CasePolicy, TokenSequence};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Smoothing applied to zero-match n-gram precisions in BLEU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    /// No smoothing: any zero precision zeroes the score.
    None,
    /// Additive: a zero-match order scores 0.1 / total.
    Epsilon,
    /// MTEval-style: the k-th zero-match order scores 1 / (2^k * total).
    #[default]
    Exponential,
}

/// Tunable parameters for the metric engine.
///
/// The defaults are the pinned configuration that reproduces the published
/// benchmark scores: BLEU-4 with exponential smoothing and all orders
/// mandatory, chrF++ with character order 6 / word order 2 / beta 2, and
/// lowercase token comparison for TER only.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    pub bleu_max_order: usize,
    pub bleu_smoothing: Smoothing,
    /// Skip n-gram orders with no n-grams instead of zeroing the score.
    /// Off by default: the benchmark scores require every order 1..max to
    /// count, so sentences shorter than the max order score 0 even against
    /// themselves. Turn on for length-tolerant sentence scoring.
    pub bleu_effective_order: bool,
    pub chrf_char_order: usize,
    pub chrf_word_order: usize,
    pub chrf_beta: f64,
    pub bleu_case: CasePolicy,
    pub chrf_case: CasePolicy,
    pub fuzz_case: CasePolicy,
    pub ter_case: CasePolicy,
    pub ter_shifts_enabled: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            bleu_max_order: 4,
            bleu_smoothing: Smoothing::Exponential,
            bleu_effective_order: false,
            chrf_char_order: 6,
            chrf_word_order: 2,
            chrf_beta: 2.0,
            bleu_case: CasePolicy::Preserve,
            chrf_case: CasePolicy::Preserve,
            fuzz_case: CasePolicy::Preserve,
            ter_case: CasePolicy::Lowercase,
            ter_shifts_enabled: true,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        if self.bleu_max_order < 1 {
            return Err(MetricError::InvalidArgument(
                "bleu_max_order must be >= 1".into(),
            ));
        }
        if self.chrf_char_order < 1 || self.chrf_word_order < 1 {
            return Err(MetricError::InvalidArgument(
                "chrf orders must be >= 1".into(),
            ));
        }
        if self.chrf_beta <= 0.0 {
            return Err(MetricError::InvalidArgument("chrf_beta must be > 0".into()));
        }
        Ok(())
    }
}

/// Scores for one hypothesis/reference pair.
///
/// `comet` is present only when an external scorer ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScores {
    pub bleu: f64,
    pub fuzz: u32,
    pub chrf_pp: f64,
    pub ter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comet: Option<f64>,
}

impl MetricScores {
    pub fn classify(&self) -> MetricRatings {
        classify(self)
    }
}

/// Computes the four local metrics for one pair under `config`.
///
/// The hypothesis order matters for TER and BLEU: `hyp` is the text being
/// judged (in back-translation audits, the reverse translation) and `reference`
/// the trusted text (the original source).
pub fn score_pair(hyp: &str, reference: &str, config: &MetricConfig) -> MetricScores {
    let fuzz = {
        let h = config.fuzz_case.apply(hyp);
        let r = config.fuzz_case.apply(reference);
        fuzz_ratio(&h, &r)
    };
    MetricScores {
        bleu: bleu(hyp, &[reference], config).unwrap_or(0.0),
        fuzz,
        chrf_pp: chrf_pp(hyp, reference, config),
        ter: ter(hyp, &[reference], config).unwrap_or(0.0),
        comet: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        MetricConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_beta_rejected() {
        let cfg = MetricConfig {
            chrf_beta: 0.0,
            ..MetricConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_order_rejected() {
        let cfg = MetricConfig {
            bleu_max_order: 0,
            ..MetricConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
