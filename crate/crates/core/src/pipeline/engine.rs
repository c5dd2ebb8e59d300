//! Pluggable translation engines.
//!
//! Three shipped implementations: an identity stub, a dictionary
//! pseudo-translator for deterministic end-to-end tests, and an adapter for
//! external engines speaking the shared wire protocol. [`CountingEngine`]
//! wraps any engine with a call counter for memory-reuse assertions.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::tm::{LangPair, TermEntry};
use crate::wire::WireClient;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("engine failure: {0}")]
    Failure(String),
}

pub trait TranslationEngine: Send + Sync {
    /// Stable engine identifier; back-translation requires a different id
    /// from the forward engine.
    fn id(&self) -> &str;

    fn supports(&self, pair: &LangPair) -> bool;

    fn translate(&self, text: &str, pair: &LangPair) -> Result<String, EngineError>;
}

/// Echoes its input; supports every language pair.
#[derive(Debug, Clone)]
pub struct IdentityEngine {
    id: String,
}

impl IdentityEngine {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into() }
    }
}

impl TranslationEngine for IdentityEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn supports(&self, _pair: &LangPair) -> bool {
        true
    }

    fn translate(&self, text: &str, _pair: &LangPair) -> Result<String, EngineError> {
        Ok(text.to_string())
    }
}

/// Deterministic pseudo-translator: exact sentence mappings first, then
/// greedy longest-phrase word substitution; unknown tokens pass through.
#[derive(Debug, Clone, Default)]
pub struct DictionaryEngine {
    id: String,
    sentences: HashMap<String, String>,
    phrases: HashMap<String, String>,
    max_phrase_len: usize,
}

fn squash_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl DictionaryEngine {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            sentences: HashMap::new(),
            phrases: HashMap::new(),
            max_phrase_len: 1,
        }
    }

    /// Adds an exact sentence mapping (whitespace-normalized key).
    pub fn with_sentence(mut self, source: &str, target: &str) -> Self {
        self.sentences.insert(squash_ws(source), target.to_string());
        self
    }

    /// Adds a word or phrase mapping (matched case-insensitively).
    pub fn with_phrase(mut self, source: &str, target: &str) -> Self {
        let key = squash_ws(&source.to_lowercase());
        self.max_phrase_len = self.max_phrase_len.max(key.split(' ').count());
        self.phrases.insert(key, target.to_string());
        self
    }

    /// Seeds phrase mappings from a termbase (source term to approved form).
    pub fn with_termbase(mut self, entries: &[TermEntry]) -> Self {
        for entry in entries {
            self = self.with_phrase(&entry.source_term, &entry.approved);
        }
        self
    }
}

impl TranslationEngine for DictionaryEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn supports(&self, _pair: &LangPair) -> bool {
        true
    }

    fn translate(&self, text: &str, _pair: &LangPair) -> Result<String, EngineError> {
        if let Some(mapped) = self.sentences.get(&squash_ws(text)) {
            return Ok(mapped.clone());
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut out: Vec<String> = Vec::with_capacity(tokens.len());
        let mut i = 0usize;
        while i < tokens.len() {
            let mut matched = false;
            let longest = self.max_phrase_len.min(tokens.len() - i);
            for len in (1..=longest).rev() {
                let key = tokens[i..i + len].join(" ").to_lowercase();
                if let Some(mapped) = self.phrases.get(&key) {
                    out.push(mapped.clone());
                    i += len;
                    matched = true;
                    break;
                }
            }
            if !matched {
                out.push(tokens[i].to_string());
                i += 1;
            }
        }
        Ok(out.join(" "))
    }
}

/// Adapter for an external engine over the shared wire protocol: request
/// `{"text": ..., "from": ..., "to": ...}`, reply `{"text": ...}`.
#[derive(Debug)]
pub struct ExternalEngine {
    id: String,
    client: WireClient,
    pairs: Option<Vec<LangPair>>,
}

impl ExternalEngine {
    pub fn command(id: impl Into<String>, argv: Vec<String>) -> Result<Self, EngineError> {
        let client = WireClient::command(argv).map_err(|e| EngineError::Failure(e.to_string()))?;
        Ok(Self {
            id: id.into(),
            client,
            pairs: None,
        })
    }

    pub fn http(id: impl Into<String>, url: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            client: WireClient::http(url),
            pairs: None,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.client = self.client.with_timeout(timeout);
        self
    }

    /// Restricts the supported pairs; unrestricted engines accept any pair.
    pub fn with_pairs(mut self, pairs: Vec<LangPair>) -> Self {
        self.pairs = Some(pairs);
        self
    }
}

impl TranslationEngine for ExternalEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn supports(&self, pair: &LangPair) -> bool {
        self.pairs.as_ref().is_none_or(|pairs| pairs.contains(pair))
    }

    fn translate(&self, text: &str, pair: &LangPair) -> Result<String, EngineError> {
        let request = serde_json::json!({
            "text": text,
            "from": pair.source(),
            "to": pair.target(),
        });
        let reply = self
            .client
            .call(&request)
            .map_err(|e| EngineError::Failure(e.to_string()))?;
        reply
            .get("text")
            .and_then(serde_json::Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| EngineError::Failure(format!("reply missing text: {reply}")))
    }
}

/// Counts translate calls on the wrapped engine.
pub struct CountingEngine {
    inner: Arc<dyn TranslationEngine>,
    calls: AtomicUsize,
}

impl CountingEngine {
    pub fn new(inner: Arc<dyn TranslationEngine>) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl TranslationEngine for CountingEngine {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn supports(&self, pair: &LangPair) -> bool {
        self.inner.supports(pair)
    }

    fn translate(&self, text: &str, pair: &LangPair) -> Result<String, EngineError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.translate(text, pair)
    }
}

/// An engine that always fails; test helper for atomic-failure paths.
#[derive(Debug, Clone)]
pub struct FailingEngine {
    pub id: String,
    pub detail: String,
}

impl TranslationEngine for FailingEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn supports(&self, _pair: &LangPair) -> bool {
        true
    }

    fn translate(&self, _text: &str, _pair: &LangPair) -> Result<String, EngineError> {
        Err(EngineError::Failure(self.detail.clone()))
    }
}
