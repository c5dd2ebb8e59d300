//! Product-level translation flow: segment, protect, translate memory-first
//! through pluggable engines, back-translate with a separate engine, score,
//! aggregate report cards, generate synthetic training sentences and select
//! balanced-diet training jobs.

mod diet;
pub mod engine;
mod protect;
mod report;
mod score;
mod segmenter;
mod synth;
mod translate;

pub use diet::{balanced_diet_select, season_of_month, DietSelection, JobCatalogEntry, Season};
pub use engine::{
    CountingEngine, DictionaryEngine, EngineError, ExternalEngine, IdentityEngine,
    TranslationEngine,
};
pub use protect::{protect_tokens, restore_tokens, PlaceholderTable};
pub use report::{report_card, MetricAggregate, RatingCounts, ReportCard, ReportFilter, WorstSegment};
pub use score::{score_job, BackPair, JobReport, JobScore, SegmentScoreRecord};
pub use segmenter::{segment_text, segment_text_with, FrameConfig, ProductPart, SegmentedProduct};
pub use synth::{generate_synthetic, SyntheticTemplate};
pub use translate::{
    attach_disclaimer, back_translate, translate_product, Disclaimers, JobSegment, JobStatus,
    PipelineConfig, Provenance, TranslationJob, TranslationOutcome,
};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported language pair: {0}")]
    UnsupportedLanguagePair(String),
    #[error("engine failed on segment {segment_index}: {detail}")]
    EngineFailure { segment_index: usize, detail: String },
    #[error("no disclaimer configured for language {0:?}")]
    MissingDisclaimer(String),
}

/// The set of product type codes the pipeline accepts.
#[derive(Debug, Clone)]
pub struct ProductTypeRegistry(HashSet<String>);

impl Default for ProductTypeRegistry {
    fn default() -> Self {
        Self(
            ["TWO", "TCP", "TCD", "ZFP", "AFD", "HLS", "NOW", "SPS"]
                .into_iter()
                .map(str::to_string)
                .collect(),
        )
    }
}

impl ProductTypeRegistry {
    pub fn register(&mut self, code: impl Into<String>) {
        self.0.insert(code.into());
    }

    pub fn contains(&self, code: &str) -> bool {
        self.0.contains(code)
    }
}

/// A raw weather text product: the unit flowing through the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub product_type: String,
    pub office: String,
    pub language: String,
    pub issued_at: i64,
    pub body: String,
}

impl Product {
    pub fn new(
        product_type: impl Into<String>,
        office: impl Into<String>,
        language: impl Into<String>,
        issued_at: i64,
        body: impl Into<String>,
        registry: &ProductTypeRegistry,
    ) -> Result<Self, PipelineError> {
        let product_type = product_type.into();
        if !registry.contains(&product_type) {
            return Err(PipelineError::InvalidArgument(format!(
                "unregistered product type {product_type:?}"
            )));
        }
        let body = body.into();
        if body.is_empty() {
            return Err(PipelineError::InvalidArgument("empty product body".into()));
        }
        Ok(Self {
            product_type,
            office: office.into(),
            language: language.into(),
            issued_at,
            body,
        })
    }
}
