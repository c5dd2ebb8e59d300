//! Termbase: mandated term translations with dialect variants, CSV
//! import/export, and surface-form enforcement against translations.
//!
//! Matching is surface-form only (no lemmatization), case-insensitive, at
//! word boundaries.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{LangPair, TmError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermVariant {
    pub term: String,
    pub region: String,
}

/// A termbase row: the approved translation of a source term plus accepted
/// dialect variants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub source_term: String,
    pub approved: String,
    pub variants: Vec<TermVariant>,
    pub notes: String,
    pub lang_pair: LangPair,
}

impl TermEntry {
    pub fn new(
        source_term: impl Into<String>,
        approved: impl Into<String>,
        variants: Vec<TermVariant>,
        notes: impl Into<String>,
        lang_pair: LangPair,
    ) -> Result<Self, TmError> {
        let source_term = source_term.into();
        let approved = approved.into();
        if approved.trim().is_empty() {
            return Err(TmError::InvalidArgument(format!(
                "term {source_term:?} has an empty approved form"
            )));
        }
        let approved_words = word_spans(&approved);
        let variants = variants
            .into_iter()
            .filter(|v| word_spans(&v.term) != approved_words)
            .collect();
        Ok(Self {
            source_term,
            approved,
            variants,
            notes: notes.into(),
            lang_pair,
        })
    }
}

/// A termbase entry whose source term occurs in the source sentence but
/// whose approved form (and no variant) appears in the translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermViolation {
    pub entry: TermEntry,
    /// byte offsets of the source-term occurrences in the source sentence
    pub positions: Vec<usize>,
}

/// Lowercased words with their byte offsets; used for token-boundary
/// phrase matching.
fn word_spans(text: &str) -> Vec<(usize, String)> {
    let mut words = Vec::new();
    let mut start: Option<usize> = None;
    let mut current = String::new();
    for (idx, c) in text.char_indices() {
        if c.is_alphanumeric() {
            if start.is_none() {
                start = Some(idx);
            }
            current.extend(c.to_lowercase());
        } else if let Some(s) = start.take() {
            words.push((s, std::mem::take(&mut current)));
        }
    }
    if let Some(s) = start {
        words.push((s, current));
    }
    words
}

/// Byte offsets where `phrase` occurs in `text` as whole words,
/// case-insensitively. Empty phrases never match.
pub(crate) fn phrase_positions(text: &str, phrase: &str) -> Vec<usize> {
    let text_words = word_spans(text);
    let phrase_words: Vec<String> = word_spans(phrase).into_iter().map(|(_, w)| w).collect();
    if phrase_words.is_empty() || text_words.len() < phrase_words.len() {
        return Vec::new();
    }
    let mut positions = Vec::new();
    for window in text_words.windows(phrase_words.len()) {
        if window
            .iter()
            .zip(&phrase_words)
            .all(|((_, w), p)| w == p)
        {
            positions.push(window[0].0);
        }
    }
    positions
}

/// Checks `translation` against the termbase: for every entry whose source
/// term occurs in `source`, the approved form or a listed variant must occur
/// in the translation.
pub fn termbase_check(
    translation: &str,
    termbase: &[TermEntry],
    source: &str,
) -> Vec<TermViolation> {
    let mut violations = Vec::new();
    for entry in termbase {
        let positions = phrase_positions(source, &entry.source_term);
        if positions.is_empty() {
            continue;
        }
        let satisfied = !phrase_positions(translation, &entry.approved).is_empty()
            || entry
                .variants
                .iter()
                .any(|v| !phrase_positions(translation, &v.term).is_empty());
        if !satisfied {
            violations.push(TermViolation {
                entry: entry.clone(),
                positions,
            });
        }
    }
    violations
}

fn encode_variants(variants: &[TermVariant]) -> String {
    variants
        .iter()
        .map(|v| format!("{}@{}", v.term, v.region))
        .collect::<Vec<_>>()
        .join(";")
}

fn decode_variants(field: &str) -> Vec<TermVariant> {
    field
        .split(';')
        .filter(|part| !part.trim().is_empty())
        .map(|part| match part.split_once('@') {
            Some((term, region)) => TermVariant {
                term: term.trim().to_string(),
                region: region.trim().to_string(),
            },
            None => TermVariant {
                term: part.trim().to_string(),
                region: String::new(),
            },
        })
        .collect()
}

const TERMBASE_HEADER: [&str; 5] = ["source_term", "approved", "variants", "notes", "lang_pair"];

/// Reads a termbase from CSV with header
/// `source_term,approved,variants,notes,lang_pair`; variants are encoded as
/// `term@REGION;term@REGION`.
pub fn read_termbase_csv<R: Read>(reader: R) -> Result<Vec<TermEntry>, TmError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| TmError::Parse(e.to_string()))?
        .clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != TERMBASE_HEADER {
        return Err(TmError::Parse(format!(
            "unexpected termbase header {:?}, expected {:?}",
            got, TERMBASE_HEADER
        )));
    }
    let mut entries = Vec::new();
    for (lineno, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| TmError::Parse(e.to_string()))?;
        if record.len() != 5 {
            return Err(TmError::Parse(format!(
                "row {}: expected 5 fields, got {}",
                lineno + 2,
                record.len()
            )));
        }
        let lang_pair: LangPair = record[4]
            .parse()
            .map_err(|e| TmError::Parse(format!("row {}: {e}", lineno + 2)))?;
        entries.push(TermEntry::new(
            record[0].to_string(),
            record[1].to_string(),
            decode_variants(&record[2]),
            record[3].to_string(),
            lang_pair,
        )?);
    }
    Ok(entries)
}

/// Writes a termbase as CSV in the fixed column order.
pub fn write_termbase_csv<W: Write>(writer: W, entries: &[TermEntry]) -> Result<(), TmError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer
        .write_record(TERMBASE_HEADER)
        .map_err(|e| TmError::Parse(e.to_string()))?;
    for entry in entries {
        csv_writer
            .write_record([
                entry.source_term.as_str(),
                entry.approved.as_str(),
                &encode_variants(&entry.variants),
                entry.notes.as_str(),
                &entry.lang_pair.to_string(),
            ])
            .map_err(|e| TmError::Parse(e.to_string()))?;
    }
    csv_writer.flush()?;
    Ok(())
}
