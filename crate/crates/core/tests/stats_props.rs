mod common;

use clmea::harness::{wilcoxon_signed_rank, Verdict};
use clmea::kernel::derive_rng;
use rand::Rng;

#[test]
fn exact_mode_matches_sign_enumeration() {
    for trial in 0..100u64 {
        let mut rng = derive_rng(trial, "wilcoxon", 0);
        let n = rng.random_range(5..=12);
        // Rounded values so tied magnitudes and zero differences show up.
        let a: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 8.0).round()).collect();
        let b: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 8.0).round()).collect();
        let w = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
        if w.insufficient {
            assert_eq!((w.p_value, w.verdict), (1.0, Verdict::Tie));
            continue;
        }
        let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let p = common::enumerated_wilcoxon_p(&diffs);
        assert!(w.exact);
        assert!((w.p_value - p).abs() < 1e-12, "trial {trial}: {} vs {p}", w.p_value);
    }
}

#[test]
fn documented_cases() {
    let w = wilcoxon_signed_rank(&[2.0; 6], &[1.0; 6], 0.05).unwrap();
    assert_eq!(w.p_value, 0.03125);
    assert_eq!(w.verdict, Verdict::Plus);
    let w = wilcoxon_signed_rank(&[2.0; 5], &[1.0; 5], 0.05).unwrap();
    assert_eq!(w.p_value, 0.0625);
    assert_eq!(w.verdict, Verdict::Tie);
    let w = wilcoxon_signed_rank(&[1.0; 8], &[1.0; 8], 0.05).unwrap();
    assert!(w.insufficient);
    assert_eq!(w.verdict, Verdict::Tie);
}

#[test]
fn normal_approximation_is_close_to_exact_at_the_switch() {
    let mut rng = derive_rng(3, "switch", 0);
    let a: Vec<f64> = (0..26).map(|i| i as f64 + rng.random::<f64>()).collect();
    let b: Vec<f64> = (0..26).map(|i| i as f64 + 0.3 + rng.random::<f64>()).collect();
    let w = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
    assert!(!w.exact);
    let exact_25 = wilcoxon_signed_rank(&a[..25], &b[..25], 0.05).unwrap();
    assert!(exact_25.exact);
    assert!((w.p_value - exact_25.p_value).abs() < 0.1);
}
