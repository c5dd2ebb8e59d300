//! Public feedback ingestion: thumbs-up / thumbs-down tallies with nonce
//! dedup, and review-queue routing for negative ratings.

use serde::{Deserialize, Serialize};

use super::store::Store;
use super::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackRating {
    Up,
    Down,
}

/// One widget click from the public site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackEvent {
    pub file_name: String,
    pub message_type: String,
    pub language: String,
    pub timestamp: i64,
    pub rating: FeedbackRating,
    /// client-supplied opaque string for dedup
    pub nonce: String,
}

/// Up/down counters for one (file, language).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackTally {
    pub file_name: String,
    pub language: String,
    pub up: u64,
    pub down: u64,
    /// set when the product file is unknown to the store (site and store
    /// may desynchronize)
    #[serde(default)]
    pub orphan: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewReason {
    NegativeFeedback,
    TermbaseViolation,
    BadRating,
}

impl ReviewReason {
    fn key(&self) -> &'static str {
        match self {
            ReviewReason::NegativeFeedback => "negative_feedback",
            ReviewReason::TermbaseViolation => "termbase_violation",
            ReviewReason::BadRating => "bad_rating",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewState {
    Open,
    Corrected,
    Dismissed,
}

/// A translated product routed to human reviewers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub id: String,
    pub product_ref: String,
    pub reason: ReviewReason,
    pub state: ReviewState,
    pub created: i64,
    pub updated: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOutcome {
    pub tally: FeedbackTally,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub review_item: Option<ReviewItem>,
    pub duplicate: bool,
}

const NS_NONCE: &str = "nonce";
const NS_TALLY: &str = "tally";
const NS_REVIEW: &str = "review";
const NS_REVIEW_OPEN: &str = "review_open";
const NS_PRODUCT: &str = "product";
const NS_META: &str = "meta";

fn tally_key(file_name: &str, language: &str) -> String {
    format!("{file_name}|{language}")
}

fn open_key(product_ref: &str, reason: ReviewReason) -> String {
    format!("{product_ref}|{}", reason.key())
}

/// Applies one feedback event: bumps the (file, language) counters, opens a
/// review item on a down-rating if none is open, and ignores duplicate
/// nonces. The whole update is one atomic store transaction.
pub fn ingest_feedback(store: &Store, event: &FeedbackEvent) -> Result<IngestOutcome, ServiceError> {
    store.transact(|txn| {
        let key = tally_key(&event.file_name, &event.language);
        if txn.contains(NS_NONCE, &event.nonce) {
            let tally = txn.get(NS_TALLY, &key).unwrap_or(FeedbackTally {
                file_name: event.file_name.clone(),
                language: event.language.clone(),
                up: 0,
                down: 0,
                orphan: false,
            });
            return Ok(IngestOutcome {
                tally,
                review_item: None,
                duplicate: true,
            });
        }
        txn.put(NS_NONCE, &event.nonce, &event.timestamp);
        let mut tally = txn.get(NS_TALLY, &key).unwrap_or(FeedbackTally {
            file_name: event.file_name.clone(),
            language: event.language.clone(),
            up: 0,
            down: 0,
            orphan: false,
        });
        match event.rating {
            FeedbackRating::Up => tally.up += 1,
            FeedbackRating::Down => tally.down += 1,
        }
        tally.orphan = !txn.contains(NS_PRODUCT, &event.file_name);
        txn.put(NS_TALLY, &key, &tally);

        let mut review_item = None;
        if event.rating == FeedbackRating::Down {
            let reason = ReviewReason::NegativeFeedback;
            let open = open_key(&event.file_name, reason);
            if !txn.contains(NS_REVIEW_OPEN, &open) {
                let seq: u64 = txn.get(NS_META, "review_seq").unwrap_or(0) + 1;
                txn.put(NS_META, "review_seq", &seq);
                let item = ReviewItem {
                    id: format!("r{seq:08}"),
                    product_ref: event.file_name.clone(),
                    reason,
                    state: ReviewState::Open,
                    created: event.timestamp,
                    updated: event.timestamp,
                };
                txn.put(NS_REVIEW, &item.id, &item);
                txn.put(NS_REVIEW_OPEN, &open, &item.id);
                review_item = Some(item);
            }
        }
        Ok(IngestOutcome {
            tally,
            review_item,
            duplicate: false,
        })
    })
}

/// Opens a review item directly (termbase violations, bad metric ratings).
/// No-op returning the existing item when one is already open for the
/// (product, reason).
pub fn open_review_item(
    store: &Store,
    product_ref: &str,
    reason: ReviewReason,
    timestamp: i64,
) -> Result<ReviewItem, ServiceError> {
    store.transact(|txn| {
        let open = open_key(product_ref, reason);
        if let Some(existing_id) = txn.get::<String>(NS_REVIEW_OPEN, &open) {
            if let Some(existing) = txn.get(NS_REVIEW, &existing_id) {
                return Ok(existing);
            }
        }
        let seq: u64 = txn.get(NS_META, "review_seq").unwrap_or(0) + 1;
        txn.put(NS_META, "review_seq", &seq);
        let item = ReviewItem {
            id: format!("r{seq:08}"),
            product_ref: product_ref.to_string(),
            reason,
            state: ReviewState::Open,
            created: timestamp,
            updated: timestamp,
        };
        txn.put(NS_REVIEW, &item.id, &item);
        txn.put(NS_REVIEW_OPEN, &open, &item.id);
        Ok(item)
    })
}

/// The oldest open review item, if any.
pub fn next_review_item(store: &Store) -> Option<ReviewItem> {
    store
        .scan::<ReviewItem>(NS_REVIEW)
        .into_iter()
        .map(|(_, item)| item)
        .filter(|item| item.state == ReviewState::Open)
        .min_by(|a, b| a.created.cmp(&b.created).then_with(|| a.id.cmp(&b.id)))
}

/// Moves an open item to `corrected` or `dismissed`.
pub fn resolve_review_item(
    store: &Store,
    id: &str,
    state: ReviewState,
    timestamp: i64,
) -> Result<ReviewItem, ServiceError> {
    if state == ReviewState::Open {
        return Err(ServiceError::InvalidArgument(
            "cannot transition back to open".into(),
        ));
    }
    store.transact(|txn| {
        let mut item: ReviewItem = txn
            .get(NS_REVIEW, id)
            .ok_or_else(|| ServiceError::NotFound(format!("review item {id}")))?;
        if item.state != ReviewState::Open {
            return Err(ServiceError::Conflict(format!(
                "review item {id} is already {:?}",
                item.state
            )));
        }
        item.state = state;
        item.updated = timestamp;
        txn.put(NS_REVIEW, id, &item);
        txn.delete(NS_REVIEW_OPEN, &open_key(&item.product_ref, item.reason));
        Ok(item)
    })
}

/// Current tally for a (file, language), if any feedback arrived.
pub fn feedback_tally(store: &Store, file_name: &str, language: &str) -> Option<FeedbackTally> {
    store.get(NS_TALLY, &tally_key(file_name, language))
}

/// Registers a product file so later feedback is not flagged orphan.
pub fn register_product_file(
    store: &Store,
    file_name: &str,
    job_id: &str,
) -> Result<(), ServiceError> {
    store.put(NS_PRODUCT, file_name, &job_id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(nonce: &str, rating: FeedbackRating) -> FeedbackEvent {
        FeedbackEvent {
            file_name: "TWO-NHC-001.txt".into(),
            message_type: "TWO".into(),
            language: "es".into(),
            timestamp: 1000,
            rating,
            nonce: nonce.into(),
        }
    }

    #[test]
    fn down_rating_opens_review_item() {
        let store = Store::in_memory();
        let outcome = ingest_feedback(&store, &event("n1", FeedbackRating::Down)).unwrap();
        assert_eq!(outcome.tally.down, 1);
        let item = outcome.review_item.unwrap();
        assert_eq!(item.state, ReviewState::Open);
        assert_eq!(item.reason, ReviewReason::NegativeFeedback);
        // a second down-rating does not open another
        let second = ingest_feedback(&store, &event("n2", FeedbackRating::Down)).unwrap();
        assert_eq!(second.tally.down, 2);
        assert!(second.review_item.is_none());
    }

    #[test]
    fn duplicate_nonce_ignored() {
        let store = Store::in_memory();
        ingest_feedback(&store, &event("n1", FeedbackRating::Up)).unwrap();
        let dup = ingest_feedback(&store, &event("n1", FeedbackRating::Up)).unwrap();
        assert!(dup.duplicate);
        assert_eq!(dup.tally.up, 1);
    }

    #[test]
    fn up_rating_only_counts() {
        let store = Store::in_memory();
        let outcome = ingest_feedback(&store, &event("n1", FeedbackRating::Up)).unwrap();
        assert_eq!(outcome.tally.up, 1);
        assert!(outcome.review_item.is_none());
        assert!(next_review_item(&store).is_none());
    }

    #[test]
    fn unknown_product_flagged_orphan() {
        let store = Store::in_memory();
        let outcome = ingest_feedback(&store, &event("n1", FeedbackRating::Up)).unwrap();
        assert!(outcome.tally.orphan);
        register_product_file(&store, "TWO-NHC-001.txt", "j1").unwrap();
        let next = ingest_feedback(&store, &event("n2", FeedbackRating::Up)).unwrap();
        assert!(!next.tally.orphan);
    }

    #[test]
    fn review_lifecycle() {
        let store = Store::in_memory();
        ingest_feedback(&store, &event("n1", FeedbackRating::Down)).unwrap();
        let item = next_review_item(&store).unwrap();
        let resolved = resolve_review_item(&store, &item.id, ReviewState::Corrected, 2000).unwrap();
        assert_eq!(resolved.state, ReviewState::Corrected);
        assert!(next_review_item(&store).is_none());
        // resolving again conflicts
        let err = resolve_review_item(&store, &item.id, ReviewState::Dismissed, 2100).unwrap_err();
        assert!(matches!(err, ServiceError::Conflict(_)));
        // after resolution a new down-rating opens a fresh item
        let outcome = ingest_feedback(&store, &event("n9", FeedbackRating::Down)).unwrap();
        assert!(outcome.review_item.is_some());
        assert_ne!(outcome.review_item.unwrap().id, item.id);
    }

    #[test]
    fn unknown_review_item_not_found() {
        let store = Store::in_memory();
        let err = resolve_review_item(&store, "r404", ReviewState::Corrected, 0).unwrap_err();
        assert!(matches!(err, ServiceError::NotFound(_)));
    }

    #[test]
    fn oldest_open_item_served_first() {
        let store = Store::in_memory();
        open_review_item(&store, "b.txt", ReviewReason::TermbaseViolation, 300).unwrap();
        open_review_item(&store, "a.txt", ReviewReason::NegativeFeedback, 100).unwrap();
        let next = next_review_item(&store).unwrap();
        assert_eq!(next.product_ref, "a.txt");
    }

    #[test]
    fn concurrent_ingest_tallies_by_distinct_nonce() {
        let store = Store::in_memory();
        std::thread::scope(|scope| {
            for t in 0..10 {
                scope.spawn({
                    let store = &store;
                    move || {
                        for i in 0..10 {
                            // 40 distinct nonces, each posted 2.5 times on average
                            let nonce = format!("n{}", (t * 10 + i) % 40);
                            let rating = if (t * 10 + i) % 40 < 15 {
                                FeedbackRating::Down
                            } else {
                                FeedbackRating::Up
                            };
                            ingest_feedback(store, &event(&nonce, rating)).unwrap();
                        }
                    }
                });
            }
        });
        let tally = feedback_tally(&store, "TWO-NHC-001.txt", "es").unwrap();
        assert_eq!(tally.up + tally.down, 40);
        assert_eq!(tally.down, 15);
    }
}
