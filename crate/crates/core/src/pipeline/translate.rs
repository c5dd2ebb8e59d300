//! Memory-first product translation and the dissemination disclaimer.
//!
//! Every sentence with a reviewed exact memory match reuses it verbatim and
//! never reaches the engine; the rest are protected, translated and
//! restored. Any engine failure fails the whole job.

use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::engine::TranslationEngine;
use super::protect::{protect_tokens, restore_tokens};
use super::score::BackPair;
use super::segmenter::{segment_text_with, FrameConfig, ProductPart};
use super::{PipelineError, Product};
use crate::tm::{termbase_check, LangPair, TermEntry, TranslationMemory};

/// Where a translated segment came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    MemoryExact,
    Engine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Completed,
    Failed,
}

/// One translated sentence with its provenance and termbase findings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSegment {
    pub index: usize,
    pub source: String,
    pub translated: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

/// Metadata and per-segment provenance for one translation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationJob {
    pub job_id: String,
    pub product_type: String,
    pub office: String,
    pub lang_pair: LangPair,
    pub engine_id: String,
    pub status: JobStatus,
    pub segments: Vec<JobSegment>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub processing_time_ms: u64,
    pub issued_at: i64,
    pub created: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationOutcome {
    pub job: TranslationJob,
    pub translated: Product,
}

/// Per-language dissemination disclaimer texts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Disclaimers(pub BTreeMap<String, String>);

/// The operational Spanish disclaimer block.
pub const DISCLAIMER_ES: &str = "Este producto ha sido procesado automáticamente utilizando un \
programa de traducción y puede contener omisiones y errores. El Servicio Nacional de \
Meteorología no puede garantizar la precisión del texto convertido. De haber alguna duda, el \
texto en inglés es siempre la versión autorizada.";

impl Default for Disclaimers {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        map.insert("es".to_string(), DISCLAIMER_ES.to_string());
        Self(map)
    }
}

impl Disclaimers {
    pub fn empty() -> Self {
        Self(BTreeMap::new())
    }

    pub fn get(&self, language: &str) -> Option<&str> {
        self.0.get(language).map(String::as_str)
    }

    pub fn set(&mut self, language: impl Into<String>, text: impl Into<String>) {
        self.0.insert(language.into(), text.into());
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub frame: FrameConfig,
    pub disclaimers: Disclaimers,
    /// Dissemination deadline in seconds since issuance; exceeding it adds a
    /// job warning. `None` disables the check.
    pub deadline_secs: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            frame: FrameConfig::default(),
            disclaimers: Disclaimers::default(),
            deadline_secs: Some(3600),
        }
    }
}

fn now_epoch() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0)
}

fn fnv1a(parts: &[&str]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for byte in part.bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        hash ^= 0x1f;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Prepends the language's disclaimer after the product frame header.
/// Idempotent; a language without a configured disclaimer is a
/// configuration error.
pub fn attach_disclaimer(
    body: &str,
    language: &str,
    disclaimers: &Disclaimers,
    frame: &FrameConfig,
) -> Result<String, PipelineError> {
    let text = disclaimers
        .get(language)
        .ok_or_else(|| PipelineError::MissingDisclaimer(language.to_string()))?;
    if body.contains(text) {
        return Ok(body.to_string());
    }
    let segmented = segment_text_with(body, frame);
    match segmented.parts.first() {
        Some(ProductPart::Frame(header)) => {
            let rest = &body[header.len()..];
            let sep = if header.ends_with('\n') { "" } else { "\n" };
            Ok(format!("{header}{sep}{text}\n\n{rest}"))
        }
        _ => Ok(format!("{text}\n\n{body}")),
    }
}

/// Translates a product sentence-by-sentence, memory first, then the engine.
///
/// Termbase violations and a missed dissemination deadline surface as job
/// warnings; an engine failure on any sentence fails the job atomically.
pub fn translate_product(
    product: &Product,
    lang_pair: &LangPair,
    engine: &dyn TranslationEngine,
    tm: &TranslationMemory,
    termbase: &[TermEntry],
    config: &PipelineConfig,
) -> Result<TranslationOutcome, PipelineError> {
    let started = Instant::now();
    if !engine.supports(lang_pair) {
        return Err(PipelineError::UnsupportedLanguagePair(format!(
            "engine {} does not support {lang_pair}",
            engine.id()
        )));
    }
    let segmented = segment_text_with(&product.body, &config.frame);
    let sentences = segmented.sentences();
    let mut segments = Vec::with_capacity(sentences.len());
    let mut translated_sentences = Vec::with_capacity(sentences.len());
    let mut warnings = Vec::new();
    for (index, sentence) in sentences.iter().enumerate() {
        let (translated, provenance) = match tm.exact(sentence, lang_pair) {
            Some(hit) => (hit.target, Provenance::MemoryExact),
            None => {
                let (protected, table) = protect_tokens(sentence);
                let out = engine.translate(&protected, lang_pair).map_err(|e| {
                    PipelineError::EngineFailure {
                        segment_index: index,
                        detail: e.to_string(),
                    }
                })?;
                (restore_tokens(&out, &table), Provenance::Engine)
            }
        };
        let violations: Vec<String> = termbase_check(&translated, termbase, sentence)
            .into_iter()
            .map(|v| {
                format!(
                    "term {:?} must appear as {:?} or a listed variant",
                    v.entry.source_term, v.entry.approved
                )
            })
            .collect();
        for violation in &violations {
            warnings.push(format!("segment {index}: {violation}"));
        }
        segments.push(JobSegment {
            index,
            source: sentence.to_string(),
            translated: translated.clone(),
            provenance,
            violations,
        });
        translated_sentences.push(translated);
    }
    let body = segmented.with_sentences(&translated_sentences)?;
    let body = attach_disclaimer(&body, lang_pair.target(), &config.disclaimers, &config.frame)?;
    let created = now_epoch();
    if let Some(deadline) = config.deadline_secs {
        if product.issued_at > 0 && created.saturating_sub(product.issued_at) > deadline as i64 {
            warnings.push(format!(
                "dissemination deadline exceeded: {}s since issuance (deadline {}s)",
                created - product.issued_at,
                deadline
            ));
        }
    }
    let job_id = format!(
        "j{:016x}",
        fnv1a(&[
            &product.product_type,
            &product.office,
            &lang_pair.to_string(),
            &product.issued_at.to_string(),
            &product.body,
            engine.id(),
        ])
    );
    let job = TranslationJob {
        job_id,
        product_type: product.product_type.clone(),
        office: product.office.clone(),
        lang_pair: lang_pair.clone(),
        engine_id: engine.id().to_string(),
        status: JobStatus::Completed,
        segments,
        warnings,
        processing_time_ms: started.elapsed().as_millis() as u64,
        issued_at: product.issued_at,
        created,
    };
    let translated = Product {
        product_type: product.product_type.clone(),
        office: product.office.clone(),
        language: lang_pair.target().to_string(),
        issued_at: product.issued_at,
        body,
    };
    Ok(TranslationOutcome { job, translated })
}

/// Back-translates every job segment through a separate, untrained engine.
/// The reverse engine id must differ from the forward engine id.
pub fn back_translate(
    job: &TranslationJob,
    reverse_engine: &dyn TranslationEngine,
) -> Result<Vec<BackPair>, PipelineError> {
    if reverse_engine.id() == job.engine_id {
        return Err(PipelineError::InvalidArgument(format!(
            "reverse engine {:?} must differ from the forward engine",
            reverse_engine.id()
        )));
    }
    let pair = job.lang_pair.reversed();
    if !reverse_engine.supports(&pair) {
        return Err(PipelineError::UnsupportedLanguagePair(format!(
            "engine {} does not support {pair}",
            reverse_engine.id()
        )));
    }
    job.segments
        .iter()
        .map(|segment| {
            let (protected, table) = protect_tokens(&segment.translated);
            let out = reverse_engine.translate(&protected, &pair).map_err(|e| {
                PipelineError::EngineFailure {
                    segment_index: segment.index,
                    detail: e.to_string(),
                }
            })?;
            Ok(BackPair {
                index: segment.index,
                original: segment.source.clone(),
                back: restore_tokens(&out, &table),
            })
        })
        .collect()
}
