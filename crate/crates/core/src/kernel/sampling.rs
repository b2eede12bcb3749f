use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BoundsBox;

/// The generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

/// Latin hypercube design of `n` points in `bounds`.
///
/// Each axis is cut into `n` equal strata and every stratum receives exactly
/// one point, placed uniformly inside it. Strata are permuted independently
/// per axis.
pub fn latin_hypercube_sample<R: Rng + ?Sized>(n: usize, bounds: &BoundsBox, rng: &mut R) -> Vec<Vec<f64>> {
    let d = bounds.dim();
    let mut points = vec![vec![0.0; d]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..d {
        strata.shuffle(rng);
        let (lo, width) = (bounds.lower()[j], bounds.width(j));
        for (point, &s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            let v = lo + width * (s as f64 + u) / n as f64;
            point[j] = v.min(bounds.upper()[j]);
        }
    }
    points
}

/// Child generator for one labelled phase of a seeded computation.
///
/// The child seed depends only on `(seed, label, counter)`, so the stream a
/// phase sees does not depend on what other phases consumed before it.
pub fn derive_rng(seed: u64, label: &str, counter: u64) -> SeededRng {
    // FNV-1a over the label, then a SplitMix64 finalizer over the mix.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed
        .wrapping_add(h.rotate_left(17))
        .wrapping_add(counter.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    SeededRng::seed_from_u64(z)
}
