mod common;

use clmea::kernel::derive_rng;
use clmea::surrogates::{pnn_fit, rbf_fit, SigmaPolicy, WidthPolicy};
use proptest::prelude::*;

// One-variable sets are left out: a dense 1-D Gaussian kernel is singular to
// working precision once the ridge is zero.
fn training_set() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    (any::<u64>(), 2usize..=30, 2usize..=20).prop_map(|(seed, n, d)| {
        let mut rng = derive_rng(seed, "rbf", 0);
        let x = common::random_points(&mut rng, n, d);
        let y1 = common::random_points(&mut rng, n, 1).into_iter().map(|v| 4.0 * v[0] - 2.0).collect();
        let y2 = common::random_points(&mut rng, n, 1).into_iter().map(|v| v[0]).collect();
        (x, y1, y2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rbf_interpolates_its_centers((x, y, _) in training_set()) {
        let model = rbf_fit(&x, &y, WidthPolicy::MedianPairwise, 0.0).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            prop_assert!((model.predict(xi).unwrap() - yi).abs() < 1e-6 * yi.abs().max(1.0));
        }
    }

    #[test]
    fn rbf_is_linear_in_its_targets((x, y1, y2) in training_set(), c in -3.0..3.0f64, q in prop::collection::vec(0.0..1.0f64, 20)) {
        let combined: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| a + c * b).collect();
        let (m1, m2, m) = (
            rbf_fit(&x, &y1, WidthPolicy::MedianPairwise, 1e-10).unwrap(),
            rbf_fit(&x, &y2, WidthPolicy::MedianPairwise, 1e-10).unwrap(),
            rbf_fit(&x, &combined, WidthPolicy::MedianPairwise, 1e-10).unwrap(),
        );
        let q = &q[..x[0].len()];
        let lhs = m.predict(q).unwrap();
        let rhs = m1.predict(q).unwrap() + c * m2.predict(q).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-6 * (1.0 + rhs.abs()));
    }

    #[test]
    fn rbf_scales_with_its_targets((x, y, _) in training_set(), a in -10.0..10.0f64, q in prop::collection::vec(0.0..1.0f64, 20)) {
        let scaled: Vec<f64> = y.iter().map(|v| a * v).collect();
        let m = rbf_fit(&x, &y, WidthPolicy::MedianPairwise, 1e-10).unwrap();
        let ma = rbf_fit(&x, &scaled, WidthPolicy::MedianPairwise, 1e-10).unwrap();
        let q = &q[..x[0].len()];
        let (lhs, rhs) = (ma.predict(q).unwrap(), a * m.predict(q).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(a.abs()));
    }

    #[test]
    fn pnn_normalization_does_not_change_the_winner(seed in any::<u64>(), sigma in 0.05..1.0f64) {
        let mut rng = derive_rng(seed, "pnn-scale", 0);
        let x = common::random_points(&mut rng, 20, 3);
        let labels: Vec<u32> = (0..20).map(|i| [3, 7, 9][i % 3]).collect();
        let model = pnn_fit(&x, &labels, SigmaPolicy::Fixed(sigma)).unwrap();
        for q in common::random_points(&mut rng, 20, 3) {
            let argmax = |v: Vec<f64>| (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j]).then(j.cmp(&i))).unwrap();
            let plain = argmax(model.densities(&q, false).unwrap());
            let normed = argmax(model.densities(&q, true).unwrap());
            prop_assert_eq!(plain, normed);
            let label = model.predict(&q).unwrap();
            prop_assert!(labels.contains(&label));
            prop_assert_eq!(label, model.labels()[plain]);
        }
    }
}

#[test]
fn pnn_with_vanishing_sigma_is_nearest_pattern() {
    let mut rng = derive_rng(7, "pnn", 0);
    let mut queries = 0;
    for set in 0..10 {
        let x = common::random_points(&mut rng, 30, 3);
        let labels: Vec<u32> = (0..30).map(|i| ((i * 7 + set) % 4) as u32).collect();
        let model = pnn_fit(&x, &labels, SigmaPolicy::Fixed(1e-6)).unwrap();
        for q in common::random_points(&mut rng, 100, 3) {
            assert_eq!(model.predict(&q).unwrap(), labels[common::nearest(&x, &q)]);
            queries += 1;
        }
    }
    assert_eq!(queries, 1000);
}
