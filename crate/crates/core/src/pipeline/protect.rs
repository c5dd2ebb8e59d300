//! Placeholder protection for non-translatable tokens: numbers, times,
//! station codes and URLs are swapped for indexed markers before a sentence
//! reaches an engine and restored afterwards.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Protected substrings by placeholder index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceholderTable {
    pub entries: Vec<String>,
}

impl PlaceholderTable {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

// Alternation order is priority order: URLs swallow their digits before the
// number pattern sees them, times before bare numbers. Station codes are
// the 4-letter K/P/T identifiers to keep false positives off ordinary
// all-caps words.
static PROTECT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)
        (?:https?://\S+ | www\.\S+ | [a-z0-9][a-z0-9.-]*\.(?:gov|com|org|net|edu|mil)(?:/\S*)?)
        | (?:\d{1,2}:\d{2}(?:\s?(?:AM|PM))?(?:\s[A-Z]{3,4})?)
        | (?:\d{1,4}\s(?:AM|PM)(?:\s[A-Z]{3,4})?)
        | (?:\d+(?:\.\d+)?%?)
        | (?:\b[KPT][A-Z]{3}\b)
        ",
    )
    .unwrap()
});

static PLACEHOLDER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"⟦(\d+)⟧").unwrap());

/// Replaces protectable tokens with `⟦n⟧` markers, returning the protected
/// sentence and the table needed to restore it. `restore_tokens(protect)` is
/// the identity.
pub fn protect_tokens(sentence: &str) -> (String, PlaceholderTable) {
    let mut table = PlaceholderTable::default();
    let mut out = String::with_capacity(sentence.len());
    let mut last = 0usize;
    for found in PROTECT.find_iter(sentence) {
        out.push_str(&sentence[last..found.start()]);
        out.push_str(&format!("⟦{}⟧", table.entries.len()));
        table.entries.push(found.as_str().to_string());
        last = found.end();
    }
    out.push_str(&sentence[last..]);
    (out, table)
}

/// Replaces `⟦n⟧` markers with their protected originals. Markers without a
/// table entry are left as-is.
pub fn restore_tokens(text: &str, table: &PlaceholderTable) -> String {
    PLACEHOLDER
        .replace_all(text, |caps: &regex::Captures<'_>| {
            caps[1]
                .parse::<usize>()
                .ok()
                .and_then(|i| table.entries.get(i).cloned())
                .unwrap_or_else(|| caps[0].to_string())
        })
        .into_owned()
}
