//! Translation Edit Rate: edits (insertions, deletions, substitutions and
//! greedy block shifts) per average reference word, as a percentage.

use std::collections::HashSet;

use super::edit::levenshtein;
use super::tokenize::tokenize;
use super::{MetricConfig, MetricError};

const MAX_SHIFT_LEN: usize = 10;
const MAX_SHIFT_ITERS: usize = 10;

/// TER of `hyp` against the closest of `refs`, normalized by the average
/// reference token count. May exceed 100 for hypotheses much longer than the
/// reference. Tokens are compared after the configured case policy
/// (lowercase by default).
pub fn ter(hyp: &str, refs: &[&str], config: &MetricConfig) -> Result<f64, MetricError> {
    if refs.is_empty() {
        return Err(MetricError::InvalidArgument(
            "ter requires at least one reference".into(),
        ));
    }
    let hyp_tokens = tokenize(hyp, config.ter_case).tokens;
    let ref_token_sets: Vec<Vec<String>> = refs
        .iter()
        .map(|r| tokenize(r, config.ter_case).tokens)
        .collect();
    let edits = ref_token_sets
        .iter()
        .map(|r| ter_edits(&hyp_tokens, r, config.ter_shifts_enabled))
        .min()
        .expect("at least one reference");
    let avg_ref_len =
        ref_token_sets.iter().map(|r| r.len()).sum::<usize>() as f64 / ref_token_sets.len() as f64;
    if avg_ref_len == 0.0 {
        // degenerate all-empty references: count raw edits
        return Ok(100.0 * edits as f64);
    }
    Ok(100.0 * edits as f64 / avg_ref_len)
}

/// Shifts + remaining Levenshtein edits after greedily applying the block
/// shift that most reduces the edit distance, while the reduction pays for
/// the shift. Shifted spans must occur contiguously in the reference.
fn ter_edits(hyp: &[String], reference: &[String], shifts_enabled: bool) -> usize {
    let mut current: Vec<&str> = hyp.iter().map(String::as_str).collect();
    let ref_seq: Vec<&str> = reference.iter().map(String::as_str).collect();
    let mut lev = levenshtein(&current, &ref_seq);
    if !shifts_enabled {
        return lev;
    }
    let mut ref_spans: HashSet<&[&str]> = HashSet::new();
    for len in 1..=MAX_SHIFT_LEN.min(ref_seq.len()) {
        for window in ref_seq.windows(len) {
            ref_spans.insert(window);
        }
    }
    let mut num_shifts = 0usize;
    for _ in 0..MAX_SHIFT_ITERS {
        if lev <= 1 {
            break;
        }
        let mut best: Option<(usize, Vec<&str>)> = None;
        for start in 0..current.len() {
            for len in 1..=MAX_SHIFT_LEN.min(current.len() - start) {
                let span = &current[start..start + len];
                if !ref_spans.contains(span) {
                    continue;
                }
                let mut rest: Vec<&str> = Vec::with_capacity(current.len() - len);
                rest.extend_from_slice(&current[..start]);
                rest.extend_from_slice(&current[start + len..]);
                for dest in 0..=rest.len() {
                    if dest == start {
                        continue;
                    }
                    let mut candidate = Vec::with_capacity(current.len());
                    candidate.extend_from_slice(&rest[..dest]);
                    candidate.extend_from_slice(span);
                    candidate.extend_from_slice(&rest[dest..]);
                    let cand_lev = levenshtein(&candidate, &ref_seq);
                    // the shift costs one edit; require a net win
                    if cand_lev + 1 < lev && best.as_ref().map_or(true, |(b, _)| cand_lev < *b) {
                        best = Some((cand_lev, candidate));
                    }
                }
            }
        }
        match best {
            Some((new_lev, seq)) => {
                current = seq;
                lev = new_lev;
                num_shifts += 1;
            }
            None => break,
        }
    }
    num_shifts + lev
}
