//! Core library for the multilingual weather-product translation toolkit.
//!
//! The crate is organized around five subsystems:
//!
//! - [`metrics`]: the five translation-quality metrics (Levenshtein, Fuzz,
//!   TER, BLEU, chrF++) plus the external-scorer adapter and the
//!   good/needs-review/bad classifier.
//! - [`tm`]: translation memory with exact and fuzzy retrieval, the review
//!   lifecycle, termbase enforcement and corpus term harvesting.
//! - [`pipeline`]: product segmentation, placeholder protection, memory-first
//!   translation through pluggable engines, back-translation scoring, report
//!   cards, synthetic corpus generation and balanced-diet job selection.
//! - [`geo`]: census language-table ingestion, LEP aggregation to county
//!   warning areas, priority-language selection, WFO ranking and dashboard
//!   exports.
//! - [`service`]: file-backed persistence, public feedback ingestion with
//!   review-queue routing, the ASCII-safe dissemination transform and the
//!   HTTP API.

pub mod geo;
pub mod metrics;
pub mod pipeline;
pub mod service;
pub mod tm;
pub mod wire;

pub use metrics::{MetricConfig, MetricScores, Rating};
pub use tm::{LangPair, Segment, SegmentStatus};
