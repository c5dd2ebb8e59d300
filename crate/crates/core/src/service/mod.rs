//! Persistence, feedback ingestion, the ASCII-safe dissemination transform
//! and the HTTP API.

pub mod api;
pub mod ascii;
pub mod feedback;
pub mod store;

pub use api::{router, serve, AppState, GeoData};
pub use ascii::{ascii_safe, AsciiPolicy, AsciiSafe};
pub use feedback::{
    feedback_tally, ingest_feedback, next_review_item, open_review_item, register_product_file,
    resolve_review_item, FeedbackEvent, FeedbackRating, FeedbackTally, IngestOutcome, ReviewItem,
    ReviewReason, ReviewState,
};
pub use store::{Store, StoreTxn};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("corrupt store at line {line}: {detail}")]
    Corrupt { line: usize, detail: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("characters not representable in ASCII: {chars:?}")]
    NonRepresentable { chars: Vec<char> },
}
