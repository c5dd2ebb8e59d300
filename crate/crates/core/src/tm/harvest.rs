//! Term harvesting: candidate specialized terms extracted from a corpus by
//! phrase-frequency analysis.
//!
//! Phrases are 1-3 lowercased tokens, never crossing sentence-terminal
//! punctuation; phrases containing a stoplist token are excluded outright.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::TmError;
use crate::metrics::{tokenize, CasePolicy};

const MAX_PHRASE_TOKENS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarvestCandidate {
    pub phrase: String,
    pub frequency: usize,
    pub documents: usize,
}

fn is_punct_token(token: &str) -> bool {
    token.chars().all(|c| !c.is_alphanumeric())
}

/// Extracts 1-3-token phrases with total frequency >= `min_freq`, ranked by
/// frequency, then document count, then lexicographically. Deterministic and
/// invariant under document reordering.
pub fn harvest_terms(
    corpus: &[String],
    stoplist: &HashSet<String>,
    min_freq: usize,
) -> Result<Vec<HarvestCandidate>, TmError> {
    if min_freq < 1 {
        return Err(TmError::InvalidArgument("min_freq must be >= 1".into()));
    }
    let stoplist: HashSet<String> = stoplist.iter().map(|w| w.to_lowercase()).collect();
    let mut frequency: HashMap<String, usize> = HashMap::new();
    let mut documents: HashMap<String, usize> = HashMap::new();
    for doc in corpus {
        let tokens = tokenize(doc, CasePolicy::Lowercase).tokens;
        let mut seen_in_doc: HashSet<String> = HashSet::new();
        // runs of word tokens between punctuation boundaries
        for run in tokens.split(|t| is_punct_token(t)) {
            for len in 1..=MAX_PHRASE_TOKENS.min(run.len()) {
                for window in run.windows(len) {
                    if window.iter().any(|t| stoplist.contains(t.as_str())) {
                        continue;
                    }
                    let phrase = window.join(" ");
                    *frequency.entry(phrase.clone()).or_insert(0) += 1;
                    seen_in_doc.insert(phrase);
                }
            }
        }
        for phrase in seen_in_doc {
            *documents.entry(phrase).or_insert(0) += 1;
        }
    }
    let mut candidates: Vec<HarvestCandidate> = frequency
        .into_iter()
        .filter(|(_, freq)| *freq >= min_freq)
        .map(|(phrase, freq)| {
            let docs = documents[&phrase];
            HarvestCandidate {
                phrase,
                frequency: freq,
                documents: docs,
            }
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then(b.documents.cmp(&a.documents))
            .then(a.phrase.cmp(&b.phrase))
    });
    Ok(candidates)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> Vec<String> {
        vec![
            "Tormenta eléctrica severa esta tarde. Posible tormenta mañana.".to_string(),
            "Aviso de tormenta para la costa.".to_string(),
            "Cielos despejados el resto de la semana.".to_string(),
        ]
    }

    #[test]
    fn counts_frequency_and_documents() {
        let candidates = harvest_terms(&corpus(), &HashSet::new(), 2).unwrap();
        let tormenta = candidates
            .iter()
            .find(|c| c.phrase == "tormenta")
            .expect("tormenta harvested");
        assert_eq!(tormenta.frequency, 3);
        assert_eq!(tormenta.documents, 2);
        for c in &candidates {
            assert!(c.frequency >= c.documents && c.documents >= 1);
        }
    }

    #[test]
    fn min_freq_filters_everything() {
        let candidates = harvest_terms(&corpus(), &HashSet::new(), 99).unwrap();
        assert!(candidates.is_empty());
    }

    #[test]
    fn full_stoplist_yields_nothing() {
        let mut stop = HashSet::new();
        for doc in corpus() {
            for t in tokenize(&doc, CasePolicy::Lowercase).tokens {
                stop.insert(t);
            }
        }
        let candidates = harvest_terms(&corpus(), &stop, 1).unwrap();
        assert!(candidates.is_empty());
    }

    #[test]
    fn phrases_do_not_cross_sentence_boundaries() {
        let docs = vec!["heavy rain. strong winds".to_string()];
        let candidates = harvest_terms(&docs, &HashSet::new(), 1).unwrap();
        assert!(candidates.iter().all(|c| c.phrase != "rain strong"));
        assert!(candidates.iter().any(|c| c.phrase == "heavy rain"));
    }

    #[test]
    fn invariant_under_document_reordering() {
        let mut docs = corpus();
        let forward = harvest_terms(&docs, &HashSet::new(), 1).unwrap();
        docs.reverse();
        let reversed = harvest_terms(&docs, &HashSet::new(), 1).unwrap();
        assert_eq!(forward, reversed);
    }

    #[test]
    fn zero_min_freq_rejected() {
        assert!(harvest_terms(&corpus(), &HashSet::new(), 0).is_err());
    }

    #[test]
    fn stoplist_excludes_containing_phrases() {
        let docs = vec!["formation chance through five days".to_string()];
        let stop: HashSet<String> = ["through".to_string()].into_iter().collect();
        let candidates = harvest_terms(&docs, &stop, 1).unwrap();
        assert!(candidates.iter().any(|c| c.phrase == "formation chance"));
        assert!(candidates.iter().all(|c| !c.phrase.contains("through")));
    }
}
