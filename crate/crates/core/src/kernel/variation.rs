//! Variation operators. Every operator that can leave the box clips its
//! output back to the nearest bound.

use rand::Rng;

use super::BoundsBox;

/// Simulated binary crossover without the final clip.
///
/// Each variable is crossed with probability `p_c`; crossed pairs keep their
/// midpoint exactly, so `(c1[i] + c2[i]) / 2 == (p1[i] + p2[i]) / 2` up to
/// rounding.
pub fn sbx_crossover_unclipped<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    eta_c: f64,
    p_c: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(p1.len(), p2.len());
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        // Draw both numbers unconditionally so the stream position does not
        // depend on the parents' values.
        let gate: f64 = rng.random();
        let u: f64 = rng.random();
        if gate >= p_c || (p1[i] - p2[i]).abs() < 1e-14 {
            continue;
        }
        let beta = if u <= 0.5 {
            (2.0 * u).powf(1.0 / (eta_c + 1.0))
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta_c + 1.0))
        };
        c1[i] = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
        c2[i] = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
    }
    (c1, c2)
}

/// Simulated binary crossover, children clipped to `bounds`.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    eta_c: f64,
    p_c: f64,
    bounds: &BoundsBox,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let (mut c1, mut c2) = sbx_crossover_unclipped(p1, p2, eta_c, p_c, rng);
    bounds.clip(&mut c1);
    bounds.clip(&mut c2);
    (c1, c2)
}

/// Bounded polynomial mutation; each variable mutates with probability `p_m`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &[f64],
    eta_m: f64,
    p_m: f64,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Vec<f64> {
    let mut y = x.to_vec();
    let mut_pow = 1.0 / (eta_m + 1.0);
    for (i, yi) in y.iter_mut().enumerate() {
        let gate: f64 = rng.random();
        let r: f64 = rng.random();
        if gate >= p_m {
            continue;
        }
        let (lo, hi) = (bounds.lower()[i], bounds.upper()[i]);
        let span = hi - lo;
        let d1 = (*yi - lo) / span;
        let d2 = (hi - *yi) / span;
        let delta = if r < 0.5 {
            let val = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1).powf(eta_m + 1.0);
            val.max(f64::MIN_POSITIVE).powf(mut_pow) - 1.0
        } else {
            let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2).powf(eta_m + 1.0);
            1.0 - val.max(f64::MIN_POSITIVE).powf(mut_pow)
        };
        *yi = (*yi + delta * span).clamp(lo, hi);
    }
    y
}

/// `base + scale * (plus - minus)`; the caller clips.
pub fn rank_based_mutation(base: &[f64], plus: &[f64], minus: &[f64], scale: f64) -> Vec<f64> {
    debug_assert!(base.len() == plus.len() && plus.len() == minus.len());
    base.iter()
        .zip(plus.iter().zip(minus))
        .map(|(b, (p, m))| b + scale * (p - m))
        .collect()
}

/// DE binomial crossover: each variable comes from `donor` with probability
/// `cr`, and at least one always does.
pub fn binomial_crossover<R: Rng + ?Sized>(target: &[f64], donor: &[f64], cr: f64, rng: &mut R) -> Vec<f64> {
    let d = target.len();
    let forced = rng.random_range(0..d);
    (0..d)
        .map(|j| {
            let r: f64 = rng.random();
            if j == forced || r < cr {
                donor[j]
            } else {
                target[j]
            }
        })
        .collect()
}
