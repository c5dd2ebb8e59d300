//! Frozen expected values computed by an independent reference
//! implementation of each metric (LCS/indel similarity, word-edit TER,
//! BLEU-4 with MTEval exponential smoothing, macro-averaged chrF++).

use wxlate_core::metrics::{bleu, chrf_pp, fuzz_ratio, ter, MetricConfig};

// (hypothesis, reference, fuzz, ter, bleu, chrf_pp)
const FROZEN: [(&str, &str, u32, f64, f64, f64); 4] = [
    (
        "Heavy rain expected tonight",
        "Heavy rain is expected tonight",
        95,
        20.0,
        35.1862973998,
        78.2496482471,
    ),
    (
        "Lows in the upper 40s",
        "Lows in the lower 40s",
        86,
        20.0,
        42.7287006396,
        61.3312055591,
    ),
    (
        "North winds around 5 mph",
        "Winds from the north near 5 mph",
        51,
        71.4285714286,
        14.3209522899,
        25.5379531153,
    ),
    (
        "Gusty winds near the coast tonight",
        "Calm winds along the coast expected tonight",
        68,
        42.8571428571,
        16.3412194488,
        38.8944269454,
    ),
];

#[test]
fn frozen_reference_pairs() {
    let config = MetricConfig::default();
    // the reference TER oracle is shift-free; shifts can only lower it
    let no_shift = MetricConfig {
        ter_shifts_enabled: false,
        ..MetricConfig::default()
    };
    for (hyp, reference, want_fuzz, want_ter, want_bleu, want_chrf) in FROZEN {
        assert_eq!(fuzz_ratio(hyp, reference), want_fuzz, "fuzz({hyp:?})");
        let got_ter = ter(hyp, &[reference], &no_shift).unwrap();
        assert!(
            (got_ter - want_ter).abs() < 1e-6,
            "ter({hyp:?}) = {got_ter}, want {want_ter}"
        );
        let shifted_ter = ter(hyp, &[reference], &config).unwrap();
        assert!(shifted_ter <= got_ter + 1e-9);
        let got_bleu = bleu(hyp, &[reference], &config).unwrap();
        assert!(
            (got_bleu - want_bleu).abs() < 1e-6,
            "bleu({hyp:?}) = {got_bleu}, want {want_bleu}"
        );
        let got_chrf = chrf_pp(hyp, reference, &config);
        assert!(
            (got_chrf - want_chrf).abs() < 1e-6,
            "chrf({hyp:?}) = {got_chrf}, want {want_chrf}"
        );
    }
}

#[test]
fn greedy_shift_engages_on_moved_block() {
    // hand-derived: shifting "North" next to its reference slot leaves
    // 3 edits; 1 shift + 3 edits over 7 reference words
    let config = MetricConfig::default();
    let got = ter(
        "North winds around 5 mph",
        &["Winds from the north near 5 mph"],
        &config,
    )
    .unwrap();
    assert!((got - 400.0 / 7.0).abs() < 1e-9, "got {got}");
}

#[test]
fn degenerate_short_hypothesis() {
    let config = MetricConfig::default();
    let (hyp, reference) = ("a", "a b c d e f g h");
    assert_eq!(fuzz_ratio(hyp, reference), 13);
    let got_ter = ter(hyp, &[reference], &config).unwrap();
    assert!((got_ter - 87.5).abs() < 1e-9);
    // no bigrams in the hypothesis: an empty order zeroes BLEU
    assert_eq!(bleu(hyp, &[reference], &config).unwrap(), 0.0);
    let got_chrf = chrf_pp(hyp, reference, &config);
    assert!((got_chrf - 3.7878787879).abs() < 1e-6, "got {got_chrf}");
}
