//! Maps raw metric scores to good / needs-review / bad ratings using the
//! benchmark thresholds. Boundary values route to human review.

use serde::{Deserialize, Serialize};

use super::MetricScores;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rating {
    Good,
    NeedsReview,
    Bad,
}

impl std::fmt::Display for Rating {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rating::Good => "good",
            Rating::NeedsReview => "needs_review",
            Rating::Bad => "bad",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricRatings {
    pub bleu: Rating,
    pub fuzz: Rating,
    pub chrf_pp: Rating,
    pub ter: Rating,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comet: Option<Rating>,
}

/// BLEU / Fuzz / chrF++ scale: > 90 good, < 50 bad.
pub fn rate_overlap(value: f64) -> Rating {
    if value > 90.0 {
        Rating::Good
    } else if value < 50.0 {
        Rating::Bad
    } else {
        Rating::NeedsReview
    }
}

/// TER scale (lower is better): < 15 good, > 30 bad.
pub fn rate_ter(value: f64) -> Rating {
    if value < 15.0 {
        Rating::Good
    } else if value > 30.0 {
        Rating::Bad
    } else {
        Rating::NeedsReview
    }
}

/// COMET scale: > 0.7 good, < 0.3 bad.
pub fn rate_comet(value: f64) -> Rating {
    if value > 0.7 {
        Rating::Good
    } else if value < 0.3 {
        Rating::Bad
    } else {
        Rating::NeedsReview
    }
}

pub fn classify(scores: &MetricScores) -> MetricRatings {
    MetricRatings {
        bleu: rate_overlap(scores.bleu),
        fuzz: rate_overlap(scores.fuzz as f64),
        chrf_pp: rate_overlap(scores.chrf_pp),
        ter: rate_ter(scores.ter),
        comet: scores.comet.map(rate_comet),
    }
}
