//! Translation memory: human-verified segment storage with exact and fuzzy
//! retrieval, the review lifecycle, and revision-with-audit-trail semantics.
//!
//! Reviewed segments are immutable; correcting one creates a new segment
//! that supersedes the old via a `supersedes` link. Exact-match reuse only
//! ever serves reviewed segments.

pub mod harvest;
pub mod termbase;

pub use harvest::{harvest_terms, HarvestCandidate};
pub use termbase::{
    read_termbase_csv, termbase_check, write_termbase_csv, TermEntry, TermViolation,
};

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::RwLock;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::metrics::fuzz_ratio;

#[derive(Debug, Error)]
pub enum TmError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid segment: {0}")]
    InvalidSegment(String),
    #[error("segment {id} is reviewed with a different target; revise it instead")]
    Conflict { id: SegmentId },
    #[error("not found: {0}")]
    NotFound(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Source/target language pair, e.g. `en-es`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(String, String)", into = "(String, String)")]
pub struct LangPair {
    source: String,
    target: String,
}

impl LangPair {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Result<Self, TmError> {
        let source = source.into();
        let target = target.into();
        if source.is_empty() || target.is_empty() {
            return Err(TmError::InvalidArgument("empty language code".into()));
        }
        if source == target {
            return Err(TmError::InvalidArgument(format!(
                "language pair codes must differ, got {source}-{target}"
            )));
        }
        Ok(Self { source, target })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn reversed(&self) -> LangPair {
        LangPair {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }
}

impl TryFrom<(String, String)> for LangPair {
    type Error = String;

    fn try_from(value: (String, String)) -> Result<Self, Self::Error> {
        LangPair::new(value.0, value.1).map_err(|e| e.to_string())
    }
}

impl From<LangPair> for (String, String) {
    fn from(value: LangPair) -> Self {
        (value.source, value.target)
    }
}

impl std::fmt::Display for LangPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.source, self.target)
    }
}

impl std::str::FromStr for LangPair {
    type Err = TmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (src, tgt) = s
            .split_once('-')
            .ok_or_else(|| TmError::Parse(format!("expected <src>-<tgt>, got {s:?}")))?;
        LangPair::new(src, tgt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SegmentId(pub String);

impl std::fmt::Display for SegmentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentStatus {
    Machine,
    Edited,
    Reviewed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentOrigin {
    Engine,
    Memory,
    Human,
}

/// One source/target sentence pair with review status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: SegmentId,
    pub source: String,
    pub target: String,
    pub lang_pair: LangPair,
    pub status: SegmentStatus,
    pub origin: SegmentOrigin,
    pub created: i64,
    pub updated: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reviewed_by: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supersedes: Option<SegmentId>,
}

/// Fields of a segment before the store assigns an id and timestamps.
#[derive(Debug, Clone)]
pub struct SegmentDraft {
    pub source: String,
    pub target: String,
    pub lang_pair: LangPair,
    pub status: SegmentStatus,
    pub origin: SegmentOrigin,
}

impl SegmentDraft {
    pub fn reviewed(source: &str, target: &str, lang_pair: LangPair) -> Self {
        Self {
            source: source.to_string(),
            target: target.to_string(),
            lang_pair,
            status: SegmentStatus::Reviewed,
            origin: SegmentOrigin::Human,
        }
    }

    pub fn machine(source: &str, target: &str, lang_pair: LangPair) -> Self {
        Self {
            source: source.to_string(),
            target: target.to_string(),
            lang_pair,
            status: SegmentStatus::Machine,
            origin: SegmentOrigin::Engine,
        }
    }
}

/// Result of a memory lookup: the reviewed exact hit, if any, plus reviewed
/// fuzzy candidates at or above the threshold (exact hit excluded), ranked
/// by similarity then recency.
#[derive(Debug, Clone, Default)]
pub struct TmLookup {
    pub exact: Option<Segment>,
    pub fuzzy: Vec<(Segment, u32)>,
}

/// Exact-match normalization: Unicode NFC plus whitespace collapse, case
/// preserved (warnings are case-meaningful).
pub fn normalize_source(s: &str) -> String {
    let composed: String = s.nfc().collect();
    composed.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug)]
struct TmInner {
    segments: Vec<Segment>,
    // normalized source + lang pair -> index of the live segment
    live: HashMap<(String, LangPair), usize>,
    superseded: Vec<bool>,
    next_seq: u64,
}

/// Outcome of `mark_reviewed`; `already_reviewed` is the no-op warning case.
#[derive(Debug, Clone)]
pub struct ReviewOutcome {
    pub segment: Segment,
    pub already_reviewed: bool,
}

/// Single-writer, multi-reader in-memory translation memory.
#[derive(Debug)]
pub struct TranslationMemory {
    inner: RwLock<TmInner>,
}

impl Default for TranslationMemory {
    fn default() -> Self {
        Self::new()
    }
}

fn now_epoch() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0)
}

impl TranslationMemory {
    pub fn new() -> Self {
        Self {
            inner: RwLock::new(TmInner {
                segments: Vec::new(),
                live: HashMap::new(),
                superseded: Vec::new(),
                next_seq: 1,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("tm lock").segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Inserts a segment. Idempotent for an identical (source, lang_pair,
    /// target); updates non-reviewed segments in place; refuses to overwrite
    /// a reviewed segment with a different target.
    pub fn insert(&self, draft: SegmentDraft) -> Result<Segment, TmError> {
        if draft.source.trim().is_empty() {
            return Err(TmError::InvalidSegment("empty source".into()));
        }
        let key = (normalize_source(&draft.source), draft.lang_pair.clone());
        let mut inner = self.inner.write().expect("tm lock");
        if let Some(&idx) = inner.live.get(&key) {
            let existing = &inner.segments[idx];
            if existing.target == draft.target {
                // idempotent by content; a reviewed insert promotes status
                if draft.status == SegmentStatus::Reviewed
                    && existing.status != SegmentStatus::Reviewed
                {
                    let now = now_epoch();
                    let seg = &mut inner.segments[idx];
                    seg.status = SegmentStatus::Reviewed;
                    seg.updated = now;
                }
                return Ok(inner.segments[idx].clone());
            }
            if existing.status == SegmentStatus::Reviewed {
                return Err(TmError::Conflict {
                    id: existing.id.clone(),
                });
            }
            let now = now_epoch();
            let seg = &mut inner.segments[idx];
            seg.target = draft.target;
            seg.status = draft.status;
            seg.origin = draft.origin;
            seg.updated = now;
            return Ok(seg.clone());
        }
        let now = now_epoch();
        let id = SegmentId(format!("s{}", inner.next_seq));
        inner.next_seq += 1;
        let segment = Segment {
            id,
            source: draft.source,
            target: draft.target,
            lang_pair: draft.lang_pair,
            status: draft.status,
            origin: draft.origin,
            created: now,
            updated: now,
            reviewed_by: None,
            supersedes: None,
        };
        let idx = inner.segments.len();
        inner.segments.push(segment.clone());
        inner.superseded.push(false);
        inner.live.insert(key, idx);
        Ok(segment)
    }

    /// The reviewed segment whose normalized source equals `source`, if any.
    /// Cheaper than [`lookup`] when fuzzy candidates are not needed.
    ///
    /// [`lookup`]: TranslationMemory::lookup
    pub fn exact(&self, source: &str, lang_pair: &LangPair) -> Option<Segment> {
        let norm = normalize_source(source);
        let inner = self.inner.read().expect("tm lock");
        inner
            .live
            .get(&(norm, lang_pair.clone()))
            .copied()
            .filter(|&i| inner.segments[i].status == SegmentStatus::Reviewed)
            .map(|i| inner.segments[i].clone())
    }

    /// Exact and fuzzy retrieval over reviewed segments.
    pub fn lookup(
        &self,
        source: &str,
        lang_pair: &LangPair,
        fuzzy_threshold: u32,
    ) -> Result<TmLookup, TmError> {
        if fuzzy_threshold > 100 {
            return Err(TmError::InvalidArgument(format!(
                "fuzzy threshold {fuzzy_threshold} outside 0-100"
            )));
        }
        let norm = normalize_source(source);
        let inner = self.inner.read().expect("tm lock");
        let exact_idx = inner
            .live
            .get(&(norm.clone(), lang_pair.clone()))
            .copied()
            .filter(|&i| inner.segments[i].status == SegmentStatus::Reviewed);
        let exact = exact_idx.map(|i| inner.segments[i].clone());
        let mut fuzzy: Vec<(Segment, u32, usize)> = Vec::new();
        for (idx, seg) in inner.segments.iter().enumerate() {
            if inner.superseded[idx]
                || seg.status != SegmentStatus::Reviewed
                || seg.lang_pair != *lang_pair
                || Some(idx) == exact_idx
            {
                continue;
            }
            let ratio = fuzz_ratio(&norm, &normalize_source(&seg.source));
            if ratio >= fuzzy_threshold {
                fuzzy.push((seg.clone(), ratio, idx));
            }
        }
        fuzzy.sort_by(|a, b| {
            b.1.cmp(&a.1)
                .then(b.0.updated.cmp(&a.0.updated))
                .then(b.2.cmp(&a.2))
        });
        Ok(TmLookup {
            exact,
            fuzzy: fuzzy.into_iter().map(|(s, r, _)| (s, r)).collect(),
        })
    }

    /// Marks a segment reviewed, making it eligible for exact-match reuse.
    pub fn mark_reviewed(&self, id: &SegmentId, reviewer: &str) -> Result<ReviewOutcome, TmError> {
        let mut inner = self.inner.write().expect("tm lock");
        let idx = find_live(&inner, id)?;
        if inner.segments[idx].status == SegmentStatus::Reviewed {
            return Ok(ReviewOutcome {
                segment: inner.segments[idx].clone(),
                already_reviewed: true,
            });
        }
        let now = now_epoch();
        let seg = &mut inner.segments[idx];
        seg.status = SegmentStatus::Reviewed;
        seg.reviewed_by = Some(reviewer.to_string());
        seg.updated = now;
        Ok(ReviewOutcome {
            segment: seg.clone(),
            already_reviewed: false,
        })
    }

    /// Creates a revision of a reviewed segment. The original is kept for
    /// audit but leaves the live index; the revision starts as `edited`.
    pub fn revise(&self, id: &SegmentId, new_target: &str) -> Result<Segment, TmError> {
        let mut inner = self.inner.write().expect("tm lock");
        let idx = find_live(&inner, id)?;
        if inner.segments[idx].status != SegmentStatus::Reviewed {
            return Err(TmError::InvalidArgument(format!(
                "segment {id} is not reviewed; edit it with insert"
            )));
        }
        let old = inner.segments[idx].clone();
        let key = (normalize_source(&old.source), old.lang_pair.clone());
        let now = now_epoch();
        let new_id = SegmentId(format!("s{}", inner.next_seq));
        inner.next_seq += 1;
        let revision = Segment {
            id: new_id,
            source: old.source.clone(),
            target: new_target.to_string(),
            lang_pair: old.lang_pair.clone(),
            status: SegmentStatus::Edited,
            origin: SegmentOrigin::Human,
            created: now,
            updated: now,
            reviewed_by: None,
            supersedes: Some(old.id.clone()),
        };
        inner.superseded[idx] = true;
        let new_idx = inner.segments.len();
        inner.segments.push(revision.clone());
        inner.superseded.push(false);
        inner.live.insert(key, new_idx);
        Ok(revision)
    }

    pub fn get(&self, id: &SegmentId) -> Option<Segment> {
        let inner = self.inner.read().expect("tm lock");
        inner.segments.iter().find(|s| &s.id == id).cloned()
    }

    /// All segments in insertion order, superseded revisions included.
    pub fn segments(&self) -> Vec<Segment> {
        self.inner.read().expect("tm lock").segments.clone()
    }

    /// Writes the memory as JSON Lines, one segment per line.
    pub fn export_jsonl<W: Write>(&self, mut w: W) -> Result<usize, TmError> {
        let inner = self.inner.read().expect("tm lock");
        for seg in &inner.segments {
            let line = serde_json::to_string(seg).map_err(|e| TmError::Parse(e.to_string()))?;
            writeln!(w, "{line}")?;
        }
        Ok(inner.segments.len())
    }

    /// Loads segments from JSON Lines produced by [`export_jsonl`]. Replaces
    /// the current contents.
    ///
    /// [`export_jsonl`]: TranslationMemory::export_jsonl
    pub fn import_jsonl<R: BufRead>(&self, r: R) -> Result<usize, TmError> {
        let mut segments: Vec<Segment> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let seg: Segment = serde_json::from_str(&line)
                .map_err(|e| TmError::Parse(format!("line {}: {e}", lineno + 1)))?;
            if seg.source.trim().is_empty() {
                return Err(TmError::InvalidSegment(format!(
                    "line {}: empty source",
                    lineno + 1
                )));
            }
            segments.push(seg);
        }
        let replaced: std::collections::HashSet<SegmentId> = segments
            .iter()
            .filter_map(|s| s.supersedes.clone())
            .collect();
        let mut superseded = Vec::with_capacity(segments.len());
        let mut live = HashMap::new();
        let mut next_seq = 1u64;
        for (idx, seg) in segments.iter().enumerate() {
            let dead = replaced.contains(&seg.id);
            superseded.push(dead);
            if !dead {
                live.insert(
                    (normalize_source(&seg.source), seg.lang_pair.clone()),
                    idx,
                );
            }
            if let Some(num) = seg.id.0.strip_prefix('s').and_then(|n| n.parse::<u64>().ok()) {
                next_seq = next_seq.max(num + 1);
            }
        }
        let count = segments.len();
        let mut inner = self.inner.write().expect("tm lock");
        *inner = TmInner {
            segments,
            live,
            superseded,
            next_seq,
        };
        Ok(count)
    }
}

fn find_live(inner: &TmInner, id: &SegmentId) -> Result<usize, TmError> {
    inner
        .segments
        .iter()
        .position(|s| &s.id == id)
        .filter(|&i| !inner.superseded[i])
        .ok_or_else(|| TmError::NotFound(format!("segment {id}")))
}
