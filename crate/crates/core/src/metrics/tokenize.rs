//! Whitespace tokenizer with NWS conventions: the `...` ellipsis separates
//! words without emitting a token, and terminal punctuation is split off.

use std::borrow::Cow;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::MetricError;

pub const TERMINAL_PUNCT: [char; 6] = ['.', ',', ';', ':', '!', '?'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CasePolicy {
    #[default]
    Preserve,
    Lowercase,
}

impl CasePolicy {
    pub fn apply<'a>(&self, s: &'a str) -> Cow<'a, str> {
        match self {
            CasePolicy::Preserve => Cow::Borrowed(s),
            CasePolicy::Lowercase => Cow::Owned(s.to_lowercase()),
        }
    }
}

/// A tokenized sentence. Joining `tokens` with single spaces gives the
/// sentence's normalized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub original: String,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn normalized(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Replaces every run of three or more dots with a space; shorter runs are
/// kept for the terminal-punctuation pass.
fn strip_ellipsis(text: &str) -> Cow<'_, str> {
    if !text.contains("...") {
        return Cow::Borrowed(text);
    }
    let mut out = String::with_capacity(text.len());
    let mut run = 0usize;
    for c in text.chars() {
        if c == '.' {
            run += 1;
            continue;
        }
        flush_dots(&mut out, run);
        run = 0;
        out.push(c);
    }
    flush_dots(&mut out, run);
    Cow::Owned(out)
}

fn flush_dots(out: &mut String, run: usize) {
    if run >= 3 {
        out.push(' ');
    } else {
        for _ in 0..run {
            out.push('.');
        }
    }
}

/// Splits `text` into tokens: whitespace-separated words, with trailing
/// `. , ; : ! ?` characters emitted as their own tokens and `...` acting as
/// a pure separator. Empty input yields an empty sequence.
pub fn tokenize(text: &str, case_policy: CasePolicy) -> TokenSequence {
    let cleaned = strip_ellipsis(text);
    let mut tokens = Vec::new();
    for word in cleaned.split_whitespace() {
        let body = word.trim_end_matches(&TERMINAL_PUNCT[..]);
        if !body.is_empty() {
            tokens.push(case_policy.apply(body).into_owned());
        }
        for c in word[body.len()..].chars() {
            tokens.push(c.to_string());
        }
    }
    TokenSequence {
        tokens,
        original: text.to_string(),
    }
}

/// All length-`n` contiguous token subsequences with multiplicities, keyed by
/// their space-joined form. Empty when `n` exceeds the token count.
pub fn extract_ngrams(
    seq: &TokenSequence,
    n: usize,
) -> Result<HashMap<String, usize>, MetricError> {
    if n == 0 {
        return Err(MetricError::InvalidArgument("n-gram order 0".into()));
    }
    let mut counts = HashMap::new();
    if n <= seq.tokens.len() {
        for window in seq.tokens.windows(n) {
            *counts.entry(window.join(" ")).or_insert(0) += 1;
        }
    }
    Ok(counts)
}
