//! Back-translation scoring: the original source is the reference, the
//! reverse translation the hypothesis, giving the worst-case view of what
//! the translation preserved.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::translate::TranslationJob;
use super::PipelineError;
use crate::metrics::{score_pair, ExternalScorer, MetricConfig, MetricRatings, MetricScores};
use crate::tm::LangPair;

/// One aligned (original sentence, back-translated sentence) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackPair {
    pub index: usize,
    pub original: String,
    pub back: String,
}

/// Persisted scores for one segment of one job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentScoreRecord {
    pub job_id: String,
    pub product_type: String,
    pub lang_pair: LangPair,
    pub segment_index: usize,
    pub source: String,
    pub back_translation: String,
    pub scores: MetricScores,
    pub ratings: MetricRatings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comet_scorer: Option<String>,
    pub scored_at: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Job-level summary over the segment records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobReport {
    pub job_id: String,
    pub segment_count: usize,
    pub mean_bleu: f64,
    pub mean_fuzz: f64,
    pub mean_chrf_pp: f64,
    pub mean_ter: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_comet: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobScore {
    pub segments: Vec<SegmentScoreRecord>,
    pub report: JobReport,
}

fn now_epoch() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0)
}

/// Scores every back pair of a job. Scorer failures degrade to a missing
/// COMET score with a warning; they never fail the job.
pub fn score_job(
    job: &TranslationJob,
    pairs: &[BackPair],
    config: &MetricConfig,
    scorer: Option<&ExternalScorer>,
) -> Result<JobScore, PipelineError> {
    if pairs.len() != job.segments.len() {
        return Err(PipelineError::InvalidArgument(format!(
            "{} back pairs for {} job segments",
            pairs.len(),
            job.segments.len()
        )));
    }
    for (pair, segment) in pairs.iter().zip(&job.segments) {
        if pair.index != segment.index {
            return Err(PipelineError::InvalidArgument(format!(
                "back pair index {} misaligned with segment {}",
                pair.index, segment.index
            )));
        }
    }
    let scored_at = now_epoch();
    let mut records = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let mut scores = score_pair(&pair.back, &pair.original, config);
        let mut warnings = Vec::new();
        let mut comet_scorer = None;
        if let Some(s) = scorer {
            match s.score(&pair.original, &pair.back, &pair.original) {
                Ok(value) => {
                    scores.comet = Some(value);
                    comet_scorer = Some(s.identity().to_string());
                }
                Err(e) => warnings.push(format!("comet unavailable: {e}")),
            }
        }
        let ratings = scores.classify();
        records.push(SegmentScoreRecord {
            job_id: job.job_id.clone(),
            product_type: job.product_type.clone(),
            lang_pair: job.lang_pair.clone(),
            segment_index: pair.index,
            source: pair.original.clone(),
            back_translation: pair.back.clone(),
            scores,
            ratings,
            comet_scorer,
            scored_at,
            warnings,
        });
    }
    let report = summarize(&job.job_id, &records);
    Ok(JobScore {
        segments: records,
        report,
    })
}

fn summarize(job_id: &str, records: &[SegmentScoreRecord]) -> JobReport {
    let n = records.len();
    let mean = |f: &dyn Fn(&SegmentScoreRecord) -> f64| -> f64 {
        if n == 0 {
            0.0
        } else {
            records.iter().map(f).sum::<f64>() / n as f64
        }
    };
    let comet_values: Vec<f64> = records.iter().filter_map(|r| r.scores.comet).collect();
    JobReport {
        job_id: job_id.to_string(),
        segment_count: n,
        mean_bleu: mean(&|r| r.scores.bleu),
        mean_fuzz: mean(&|r| r.scores.fuzz as f64),
        mean_chrf_pp: mean(&|r| r.scores.chrf_pp),
        mean_ter: mean(&|r| r.scores.ter),
        mean_comet: if comet_values.len() == n && n > 0 {
            Some(comet_values.iter().sum::<f64>() / n as f64)
        } else {
            None
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Rating;
    use crate::pipeline::engine::{DictionaryEngine, IdentityEngine};
    use crate::pipeline::translate::{back_translate, translate_product, PipelineConfig};
    use crate::pipeline::{Product, ProductTypeRegistry};
    use crate::tm::TranslationMemory;

    fn en_es() -> LangPair {
        LangPair::new("en", "es").unwrap()
    }

    fn job_for(body: &str, forward: &dyn crate::pipeline::TranslationEngine) -> TranslationJob {
        let product = Product::new(
            "TWO",
            "NHC",
            "en",
            0,
            body,
            &ProductTypeRegistry::default(),
        )
        .unwrap();
        translate_product(
            &product,
            &en_es(),
            forward,
            &TranslationMemory::new(),
            &[],
            &PipelineConfig::default(),
        )
        .unwrap()
        .job
    }

    #[test]
    fn identity_roundtrip_scores_perfect() {
        let job = job_for("Heavy rain tonight. Gusty winds tomorrow.", &IdentityEngine::new("fwd"));
        let pairs = back_translate(&job, &IdentityEngine::new("rev")).unwrap();
        let result = score_job(&job, &pairs, &MetricConfig::default(), None).unwrap();
        assert_eq!(result.segments.len(), 2);
        for record in &result.segments {
            assert!((record.scores.bleu - 100.0).abs() < 1e-9);
            assert_eq!(record.scores.fuzz, 100);
            assert!((record.scores.chrf_pp - 100.0).abs() < 1e-9);
            assert_eq!(record.scores.ter, 0.0);
            assert_eq!(record.scores.comet, None);
            assert_eq!(record.ratings.bleu, Rating::Good);
            assert_eq!(record.ratings.ter, Rating::Good);
        }
        assert!((result.report.mean_chrf_pp - 100.0).abs() < 1e-9);
        assert_eq!(result.report.mean_comet, None);
    }

    #[test]
    fn published_spanish_row_reproduced() {
        let forward = DictionaryEngine::new("fwd").with_sentence(
            "Tropical Weather Outlook",
            "Perspectiva sobre las Condiciones del Tiempo en el Trópico",
        );
        let job = job_for("Tropical Weather Outlook", &forward);
        let reverse = DictionaryEngine::new("rev").with_sentence(
            "Perspectiva sobre las Condiciones del Tiempo en el Trópico",
            "Perspective on Weather Conditions in the Tropics",
        );
        let pairs = back_translate(&job, &reverse).unwrap();
        let result = score_job(&job, &pairs, &MetricConfig::default(), None).unwrap();
        let s = &result.segments[0].scores;
        assert!((s.bleu - 6.567).abs() < 0.005, "bleu {}", s.bleu);
        assert_eq!(s.fuzz, 42);
        assert!((s.chrf_pp - 29.626).abs() < 0.01, "chrf {}", s.chrf_pp);
        assert!((s.ter - 200.0).abs() < 1e-9, "ter {}", s.ter);
        let r = &result.segments[0].ratings;
        assert_eq!(r.bleu, Rating::Bad);
        assert_eq!(r.ter, Rating::Bad);
    }

    #[test]
    fn scorer_failure_degrades_to_warning() {
        let job = job_for("One sentence.", &IdentityEngine::new("fwd"));
        let pairs = back_translate(&job, &IdentityEngine::new("rev")).unwrap();
        let broken = ExternalScorer::command(vec![
            "sh".into(),
            "-c".into(),
            "exit 1".into(),
        ])
        .unwrap();
        let result =
            score_job(&job, &pairs, &MetricConfig::default(), Some(&broken)).unwrap();
        assert_eq!(result.segments[0].scores.comet, None);
        assert!(!result.segments[0].warnings.is_empty());
    }

    #[test]
    fn stub_scorer_populates_comet_with_provenance() {
        let job = job_for("One sentence.", &IdentityEngine::new("fwd"));
        let pairs = back_translate(&job, &IdentityEngine::new("rev")).unwrap();
        let stub = ExternalScorer::command(vec![
            "sh".into(),
            "-c".into(),
            r#"while read line; do echo '{"score":0.5}'; done"#.into(),
        ])
        .unwrap();
        let result = score_job(&job, &pairs, &MetricConfig::default(), Some(&stub)).unwrap();
        assert_eq!(result.segments[0].scores.comet, Some(0.5));
        assert_eq!(result.segments[0].ratings.comet, Some(Rating::NeedsReview));
        assert!(result.segments[0].comet_scorer.as_deref().unwrap().starts_with("cmd:"));
        assert_eq!(result.report.mean_comet, Some(0.5));
    }

    #[test]
    fn misaligned_pairs_rejected() {
        let job = job_for("One sentence. Two sentences.", &IdentityEngine::new("fwd"));
        let pairs = vec![BackPair {
            index: 0,
            original: "One sentence.".into(),
            back: "One sentence.".into(),
        }];
        assert!(score_job(&job, &pairs, &MetricConfig::default(), None).is_err());
    }
}
