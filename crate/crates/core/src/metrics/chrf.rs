//! chrF++: character n-gram F-score augmented with word n-grams.
//!
//! Precision and recall are averaged across all character orders
//! (1..chrf_char_order) and word orders (1..chrf_word_order) first, then
//! combined once as F_beta. Orders with no n-grams on either side are
//! skipped, so identical short strings still score 100.

use std::collections::HashMap;
use std::hash::Hash;

use super::tokenize::tokenize;
use super::{CasePolicy, MetricConfig};

fn counts<T: Eq + Hash>(seq: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut map = HashMap::new();
    if n <= seq.len() {
        for window in seq.windows(n) {
            *map.entry(window).or_insert(0) += 1;
        }
    }
    map
}

/// Per-order precision and recall; `None` when neither side has n-grams of
/// this order.
fn order_stats<T: Eq + Hash>(hyp: &[T], reference: &[T], n: usize) -> Option<(f64, f64)> {
    let hyp_total = hyp.len().checked_sub(n - 1).unwrap_or(0);
    let ref_total = reference.len().checked_sub(n - 1).unwrap_or(0);
    if hyp_total == 0 && ref_total == 0 {
        return None;
    }
    if hyp_total == 0 || ref_total == 0 {
        return Some((0.0, 0.0));
    }
    let hyp_counts = counts(hyp, n);
    let ref_counts = counts(reference, n);
    let matched: usize = hyp_counts
        .iter()
        .map(|(gram, c)| (*c).min(*ref_counts.get(gram).unwrap_or(&0)))
        .sum();
    Some((
        matched as f64 / hyp_total as f64,
        matched as f64 / ref_total as f64,
    ))
}

/// chrF++ score of `hyp` against `reference`, scaled to 0-100.
///
/// Character n-grams are taken over the whitespace-stripped text; word
/// n-grams over the module tokenizer's output.
pub fn chrf_pp(hyp: &str, reference: &str, config: &MetricConfig) -> f64 {
    let hyp_cased = config.chrf_case.apply(hyp);
    let ref_cased = config.chrf_case.apply(reference);
    let hyp_chars: Vec<char> = hyp_cased.split_whitespace().collect::<String>().chars().collect();
    let ref_chars: Vec<char> = ref_cased.split_whitespace().collect::<String>().chars().collect();
    let hyp_words = tokenize(&hyp_cased, CasePolicy::Preserve).tokens;
    let ref_words = tokenize(&ref_cased, CasePolicy::Preserve).tokens;

    let mut prec_sum = 0.0;
    let mut rec_sum = 0.0;
    let mut counted = 0usize;
    for n in 1..=config.chrf_char_order {
        if let Some((p, r)) = order_stats(&hyp_chars, &ref_chars, n) {
            prec_sum += p;
            rec_sum += r;
            counted += 1;
        }
    }
    for n in 1..=config.chrf_word_order {
        if let Some((p, r)) = order_stats(&hyp_words, &ref_words, n) {
            prec_sum += p;
            rec_sum += r;
            counted += 1;
        }
    }
    if counted == 0 {
        // both sides empty of any n-grams (blank strings)
        return if hyp_chars == ref_chars { 100.0 } else { 0.0 };
    }
    let precision = prec_sum / counted as f64;
    let recall = rec_sum / counted as f64;
    let beta2 = config.chrf_beta * config.chrf_beta;
    let denom = beta2 * precision + recall;
    if denom <= 0.0 {
        0.0
    } else {
        100.0 * (1.0 + beta2) * precision * recall / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> MetricConfig {
        MetricConfig::default()
    }

    #[test]
    fn identity_scores_100() {
        for s in ["Heavy rain expected tonight", "ab", "x"] {
            let v = chrf_pp(s, s, &cfg());
            assert!((v - 100.0).abs() < 1e-9, "{s:?} scored {v}");
        }
    }

    #[test]
    fn published_pairs() {
        let es = chrf_pp(
            "Perspective on Weather Conditions in the Tropics",
            "Tropical Weather Outlook",
            &cfg(),
        );
        assert!((es - 29.626).abs() < 0.01, "got {es}");
        let fr = chrf_pp(
            "Tropical weather forecast",
            "Tropical Weather Outlook",
            &cfg(),
        );
        assert!((fr - 38.677).abs() < 0.01, "got {fr}");
    }

    #[test]
    fn bounded() {
        for (h, r) in [
            ("", ""),
            ("", "something"),
            ("something", ""),
            ("abc", "xyz"),
            ("partial overlap here", "partial overlap there"),
        ] {
            let v = chrf_pp(h, r, &cfg());
            assert!((0.0..=100.0).contains(&v), "({h:?},{r:?}) scored {v}");
        }
        assert_eq!(chrf_pp("", "", &cfg()), 100.0);
        assert_eq!(chrf_pp("", "something", &cfg()), 0.0);
    }

    #[test]
    fn disjoint_strings_score_zero() {
        assert_eq!(chrf_pp("aaa", "bbb", &cfg()), 0.0);
    }
}
