//! ASCII-safe dissemination transform.
//!
//! Legacy dissemination paths only carry ASCII. Latin letters are
//! canonically decomposed and their combining marks removed (a defined,
//! non-lossy mapping), a small override table handles letters without
//! decompositions and typographic punctuation, and anything left is either
//! replaced by `?` (strip policy, flagged lossy) or rejected.
//!
//! Mapping table version: 1.

use serde::{Deserialize, Serialize};
use unicode_normalization::char::{decompose_canonical, is_combining_mark};

use super::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsciiPolicy {
    StripDiacritics,
    RejectNonLatin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsciiSafe {
    pub text: String,
    /// true when characters had to be replaced by `?`
    pub lossy: bool,
    /// the characters that were replaced
    pub dropped: Vec<char>,
}

/// Explicit mappings for characters without a useful canonical
/// decomposition. Kept small and documented; bump the module version when
/// it changes.
fn override_mapping(c: char) -> Option<&'static str> {
    Some(match c {
        'ß' => "ss",
        'ẞ' => "SS",
        'æ' => "ae",
        'Æ' => "AE",
        'œ' => "oe",
        'Œ' => "OE",
        'ø' => "o",
        'Ø' => "O",
        'đ' | 'ð' => "d",
        'Đ' | 'Ð' => "D",
        'ł' => "l",
        'Ł' => "L",
        'þ' => "th",
        'Þ' => "Th",
        'ı' => "i",
        '\u{2018}' | '\u{2019}' | '\u{201A}' => "'",
        '\u{201C}' | '\u{201D}' | '\u{201E}' => "\"",
        '\u{2013}' | '\u{2014}' | '\u{2015}' => "-",
        '\u{2026}' => "...",
        '\u{00A0}' => " ",
        // inverted punctuation is conventionally dropped on ASCII paths
        '¡' | '¿' => "",
        _ => return None,
    })
}

/// Decomposes one character and strips combining marks; `Some` only when
/// the result is pure ASCII.
fn decompose_to_ascii(c: char) -> Option<String> {
    let mut out = String::new();
    let mut ascii = true;
    decompose_canonical(c, |d| {
        if is_combining_mark(d) {
            return;
        }
        if d.is_ascii() {
            out.push(d);
        } else if let Some(mapped) = override_mapping(d) {
            out.push_str(mapped);
        } else {
            ascii = false;
        }
    });
    (ascii && !out.is_empty()).then_some(out)
}

/// Converts `text` to pure ASCII bytes under the given policy.
///
/// Strip policy replaces non-representable characters with `?` and flags
/// the result lossy; reject policy fails listing the offending characters.
/// Diacritic removal itself is a defined mapping and is not lossy.
pub fn ascii_safe(text: &str, policy: AsciiPolicy) -> Result<AsciiSafe, ServiceError> {
    let mut out = String::with_capacity(text.len());
    let mut dropped = Vec::new();
    for c in text.chars() {
        if c.is_ascii() {
            out.push(c);
            continue;
        }
        if let Some(mapped) = override_mapping(c) {
            out.push_str(mapped);
            continue;
        }
        if let Some(mapped) = decompose_to_ascii(c) {
            out.push_str(&mapped);
            continue;
        }
        match policy {
            AsciiPolicy::StripDiacritics => {
                out.push('?');
                if !dropped.contains(&c) {
                    dropped.push(c);
                }
            }
            AsciiPolicy::RejectNonLatin => {
                if !dropped.contains(&c) {
                    dropped.push(c);
                }
            }
        }
    }
    if policy == AsciiPolicy::RejectNonLatin && !dropped.is_empty() {
        return Err(ServiceError::NonRepresentable { chars: dropped });
    }
    debug_assert!(out.bytes().all(|b| b < 128));
    Ok(AsciiSafe {
        lossy: !dropped.is_empty(),
        dropped,
        text: out,
    })
}
