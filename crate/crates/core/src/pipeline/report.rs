//! Report cards: unweighted aggregation of stored segment scores, filtered
//! by product type, language pair and time window.

use serde::{Deserialize, Serialize};

use super::score::SegmentScoreRecord;
use crate::metrics::Rating;
use crate::tm::LangPair;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportFilter {
    pub product_type: Option<String>,
    pub lang_pair: Option<LangPair>,
    /// inclusive `scored_at` window bounds (unix seconds)
    pub from: Option<i64>,
    pub to: Option<i64>,
}

impl ReportFilter {
    pub fn matches(&self, record: &SegmentScoreRecord) -> bool {
        if let Some(ref t) = self.product_type {
            if &record.product_type != t {
                return false;
            }
        }
        if let Some(ref p) = self.lang_pair {
            if &record.lang_pair != p {
                return false;
            }
        }
        if let Some(from) = self.from {
            if record.scored_at < from {
                return false;
            }
        }
        if let Some(to) = self.to {
            if record.scored_at > to {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricAggregate {
    pub mean: f64,
    pub median: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingCounts {
    pub good: usize,
    pub needs_review: usize,
    pub bad: usize,
}

impl RatingCounts {
    fn add(&mut self, rating: Rating) {
        match rating {
            Rating::Good => self.good += 1,
            Rating::NeedsReview => self.needs_review += 1,
            Rating::Bad => self.bad += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstSegment {
    pub job_id: String,
    pub segment_index: usize,
    pub source: String,
    pub back_translation: String,
    pub chrf_pp: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comet: Option<f64>,
}

/// Aggregate over the selected segments: per-metric mean and median, rating
/// histograms and the worst segments.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportCard {
    pub count: usize,
    pub bleu: Option<MetricAggregate>,
    pub fuzz: Option<MetricAggregate>,
    pub chrf_pp: Option<MetricAggregate>,
    pub ter: Option<MetricAggregate>,
    pub comet: Option<MetricAggregate>,
    pub bleu_ratings: RatingCounts,
    pub fuzz_ratings: RatingCounts,
    pub chrf_pp_ratings: RatingCounts,
    pub ter_ratings: RatingCounts,
    pub comet_ratings: RatingCounts,
    pub worst_segments: Vec<WorstSegment>,
}

const WORST_LIMIT: usize = 5;

fn aggregate(mut values: Vec<f64>) -> Option<MetricAggregate> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite metric values"));
    let mid = values.len() / 2;
    let median = if values.len() % 2 == 0 {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    };
    Some(MetricAggregate { mean, median })
}

/// Builds the report card for the records matching `filter`. An empty
/// selection is an empty report, not an error; the result is deterministic
/// for a fixed record set.
pub fn report_card<'a>(
    records: impl IntoIterator<Item = &'a SegmentScoreRecord>,
    filter: &ReportFilter,
) -> ReportCard {
    let selected: Vec<&SegmentScoreRecord> =
        records.into_iter().filter(|r| filter.matches(r)).collect();
    let mut card = ReportCard {
        count: selected.len(),
        ..ReportCard::default()
    };
    if selected.is_empty() {
        return card;
    }
    card.bleu = aggregate(selected.iter().map(|r| r.scores.bleu).collect());
    card.fuzz = aggregate(selected.iter().map(|r| r.scores.fuzz as f64).collect());
    card.chrf_pp = aggregate(selected.iter().map(|r| r.scores.chrf_pp).collect());
    card.ter = aggregate(selected.iter().map(|r| r.scores.ter).collect());
    let comet_values: Vec<f64> = selected.iter().filter_map(|r| r.scores.comet).collect();
    let all_have_comet = comet_values.len() == selected.len();
    card.comet = aggregate(comet_values);
    for record in &selected {
        card.bleu_ratings.add(record.ratings.bleu);
        card.fuzz_ratings.add(record.ratings.fuzz);
        card.chrf_pp_ratings.add(record.ratings.chrf_pp);
        card.ter_ratings.add(record.ratings.ter);
        if let Some(c) = record.ratings.comet {
            card.comet_ratings.add(c);
        }
    }
    // worst segments by COMET when every segment has one, else by chrF++
    let mut ranked: Vec<&&SegmentScoreRecord> = selected.iter().collect();
    ranked.sort_by(|a, b| {
        let key_a = if all_have_comet {
            a.scores.comet.expect("comet present")
        } else {
            a.scores.chrf_pp
        };
        let key_b = if all_have_comet {
            b.scores.comet.expect("comet present")
        } else {
            b.scores.chrf_pp
        };
        key_a
            .partial_cmp(&key_b)
            .expect("finite metric values")
            .then_with(|| a.job_id.cmp(&b.job_id))
            .then_with(|| a.segment_index.cmp(&b.segment_index))
    });
    card.worst_segments = ranked
        .into_iter()
        .take(WORST_LIMIT)
        .map(|r| WorstSegment {
            job_id: r.job_id.clone(),
            segment_index: r.segment_index,
            source: r.source.clone(),
            back_translation: r.back_translation.clone(),
            chrf_pp: r.scores.chrf_pp,
            comet: r.scores.comet,
        })
        .collect();
    card
}
