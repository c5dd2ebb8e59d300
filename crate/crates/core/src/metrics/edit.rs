//! Edit-distance primitives: unit-cost Levenshtein distance and the
//! matched-character fuzzy similarity ratio.

/// Minimal number of insertions, deletions or substitutions turning `a`
/// into `b`. Works on any comparable element type (characters, tokens).
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let tmp = row[j + 1];
            row[j + 1] = (tmp + 1)
                .min(row[j] + 1)
                .min(diag + usize::from(ca != cb));
            diag = tmp;
        }
    }
    row[b.len()]
}

/// Character-level Levenshtein distance between two strings.
pub fn levenshtein_str(a: &str, b: &str) -> usize {
    let ac: Vec<char> = a.chars().collect();
    let bc: Vec<char> = b.chars().collect();
    levenshtein(&ac, &bc)
}

/// Length of the longest common subsequence of `a` and `b`.
pub(crate) fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut row = vec![0usize; short.len() + 1];
    for lc in long {
        let mut diag = 0;
        for (j, sc) in short.iter().enumerate() {
            let tmp = row[j + 1];
            row[j + 1] = if lc == sc {
                diag + 1
            } else {
                row[j + 1].max(row[j])
            };
            diag = tmp;
        }
    }
    row[short.len()]
}

/// Fuzzy similarity: round(100 * 2M / (|a| + |b|)) where M is the number of
/// matched characters in a longest-common-subsequence alignment. Equivalent
/// to 100 * (1 - d_indel / (|a| + |b|)) for insert/delete-only edit distance.
/// Symmetric; two empty strings score 100.
pub fn fuzz_ratio(a: &str, b: &str) -> u32 {
    let ac: Vec<char> = a.chars().collect();
    let bc: Vec<char> = b.chars().collect();
    let total = ac.len() + bc.len();
    if total == 0 {
        return 100;
    }
    let matched = lcs_len(&ac, &bc);
    (200.0 * matched as f64 / total as f64).round() as u32
}
