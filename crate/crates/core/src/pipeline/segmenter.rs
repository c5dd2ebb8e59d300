//! Product segmentation: leading and trailing frame lines (communication
//! headers, codes, timestamps) are preserved verbatim; the prose body is
//! split into sentences. Reassembly is byte-identical for any input.

use std::sync::LazyLock;

use regex::Regex;

use super::PipelineError;

/// Patterns classifying a line as product frame rather than prose. The
/// defaults cover WMO/AWIPS header codes (all-caps, no sentence
/// punctuation), issuance timestamps and the `$$` footer; the set is
/// configurable because header conventions vary by product.
#[derive(Debug, Clone)]
pub struct FrameConfig {
    patterns: Vec<Regex>,
}

static DEFAULT_FRAME_PATTERNS: LazyLock<Vec<Regex>> = LazyLock::new(|| {
    vec![
        // communication codes: "000", "ABNT20 KNHC 011200", "TWOAT", "MIATWOAT"
        Regex::new(r"^[A-Z0-9][A-Z0-9 \-/]{0,47}$").unwrap(),
        // issuance timestamps: "1100 PM EST Tue Nov 30 2025", "800 AM EDT Tue Jul 1 2025"
        Regex::new(r"^\d{1,4} (AM|PM) [A-Z]{3,4} .*\d{4}$").unwrap(),
        Regex::new(r"^\$\$$").unwrap(),
        Regex::new(r"^&&$").unwrap(),
    ]
});

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            patterns: DEFAULT_FRAME_PATTERNS.clone(),
        }
    }
}

impl FrameConfig {
    pub fn new(patterns: Vec<Regex>) -> Self {
        Self { patterns }
    }

    pub fn is_frame_line(&self, line: &str) -> bool {
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() {
            return true;
        }
        self.patterns.iter().any(|p| p.is_match(trimmed.trim_end()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProductPart {
    /// Verbatim non-translatable chunk (header/footer lines, including
    /// their line endings).
    Frame(String),
    /// One sentence, exactly as it appears in the source.
    Sentence(String),
    /// Whitespace between sentences, preserved exactly.
    Gap(String),
}

/// A product split into frame, sentences and gaps. Concatenating the parts
/// reproduces the input byte-for-byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedProduct {
    pub parts: Vec<ProductPart>,
}

impl SegmentedProduct {
    pub fn sentences(&self) -> Vec<&str> {
        self.parts
            .iter()
            .filter_map(|p| match p {
                ProductPart::Sentence(s) => Some(s.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn reassemble(&self) -> String {
        let mut out = String::new();
        for part in &self.parts {
            match part {
                ProductPart::Frame(s) | ProductPart::Sentence(s) | ProductPart::Gap(s) => {
                    out.push_str(s)
                }
            }
        }
        out
    }

    /// Reassembles with each sentence replaced in order; frame and gaps are
    /// untouched.
    pub fn with_sentences(&self, replacements: &[String]) -> Result<String, PipelineError> {
        let expected = self.sentences().len();
        if replacements.len() != expected {
            return Err(PipelineError::InvalidArgument(format!(
                "expected {expected} replacement sentences, got {}",
                replacements.len()
            )));
        }
        let mut out = String::new();
        let mut next = 0usize;
        for part in &self.parts {
            match part {
                ProductPart::Frame(s) | ProductPart::Gap(s) => out.push_str(s),
                ProductPart::Sentence(_) => {
                    out.push_str(&replacements[next]);
                    next += 1;
                }
            }
        }
        Ok(out)
    }
}

/// True when the dot at byte `idx` is part of a run of two or more dots
/// (the NWS ellipsis), which never terminates a sentence.
fn in_dot_run(bytes: &[u8], idx: usize) -> bool {
    (idx > 0 && bytes[idx - 1] == b'.') || (idx + 1 < bytes.len() && bytes[idx + 1] == b'.')
}

/// Splits prose into alternating gap/sentence parts. A sentence ends at a
/// `.`, `!` or `?` followed by whitespace or end of text; `...` never ends
/// a sentence.
fn split_sentences(prose: &str, parts: &mut Vec<ProductPart>) {
    let bytes = prose.as_bytes();
    let mut pos = 0usize;
    while pos < bytes.len() {
        // leading whitespace becomes a gap
        let ws_end = prose[pos..]
            .find(|c: char| !c.is_whitespace())
            .map(|off| pos + off)
            .unwrap_or(bytes.len());
        if ws_end > pos {
            parts.push(ProductPart::Gap(prose[pos..ws_end].to_string()));
            pos = ws_end;
        }
        if pos >= bytes.len() {
            break;
        }
        // scan for a sentence terminator
        let mut end = bytes.len();
        let mut i = pos;
        while i < bytes.len() {
            let b = bytes[i];
            let terminal = match b {
                b'!' | b'?' => true,
                b'.' => !in_dot_run(bytes, i),
                _ => false,
            };
            if terminal {
                let next_ws = i + 1 >= bytes.len() || bytes[i + 1].is_ascii_whitespace();
                let run_end = i + 1 < bytes.len() && matches!(bytes[i + 1], b'!' | b'?');
                if next_ws && !run_end {
                    end = i + 1;
                    break;
                }
            }
            i += 1;
        }
        parts.push(ProductPart::Sentence(prose[pos..end].to_string()));
        pos = end;
    }
}

/// Segments a raw product into frame and sentences. See [`FrameConfig`] for
/// the header/footer heuristic.
pub fn segment_text_with(body: &str, config: &FrameConfig) -> SegmentedProduct {
    let lines: Vec<&str> = body.split_inclusive('\n').collect();
    let mut top = 0usize;
    while top < lines.len() && config.is_frame_line(lines[top]) {
        top += 1;
    }
    let mut bottom = lines.len();
    while bottom > top && config.is_frame_line(lines[bottom - 1]) {
        bottom -= 1;
    }
    let mut parts = Vec::new();
    if top > 0 {
        parts.push(ProductPart::Frame(lines[..top].concat()));
    }
    if bottom > top {
        split_sentences(&lines[top..bottom].concat(), &mut parts);
    }
    if bottom < lines.len() {
        parts.push(ProductPart::Frame(lines[bottom..].concat()));
    }
    SegmentedProduct { parts }
}

/// [`segment_text_with`] under the default frame heuristic.
pub fn segment_text(body: &str) -> SegmentedProduct {
    segment_text_with(body, &FrameConfig::default())
}
