//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use clmea::indicators::hypervolume;
use clmea::kernel::{Archive, BoundsBox};
use clmea::strategies::CandidatePool;
use rand::Rng;

pub fn brute_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Front index of every point: peel off the points nobody remaining dominates.
pub fn brute_ranks(points: &[Vec<f64>]) -> Vec<usize> {
    let mut rank = vec![usize::MAX; points.len()];
    let mut level = 0;
    while rank.iter().any(|&r| r == usize::MAX) {
        let layer: Vec<usize> = (0..points.len())
            .filter(|&i| rank[i] == usize::MAX)
            .filter(|&i| !(0..points.len()).any(|j| rank[j] == usize::MAX && brute_dominates(&points[j], &points[i])))
            .collect();
        for i in layer {
            rank[i] = level;
        }
        level += 1;
    }
    rank
}

/// Hypervolume by inclusion-exclusion over every non-empty subset.
pub fn inclusion_exclusion_hv(front: &[Vec<f64>], reference: &[f64]) -> f64 {
    let n = front.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut corner = vec![f64::NEG_INFINITY; reference.len()];
        for (i, p) in front.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (c, v) in corner.iter_mut().zip(p) {
                    *c = c.max(*v);
                }
            }
        }
        let vol: f64 = corner.iter().zip(reference).map(|(c, r)| (r - c).max(0.0)).product();
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * vol;
    }
    total
}

/// Two-sided exact Wilcoxon p-value by listing all `2^n` sign assignments.
pub fn enumerated_wilcoxon_p(diffs: &[f64]) -> f64 {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = nz.len();
    let mags: Vec<f64> = nz.iter().map(|d| d.abs()).collect();
    let ranks: Vec<f64> = mags
        .iter()
        .map(|m| {
            let below = mags.iter().filter(|o| *o < m).count() as f64;
            let equal = mags.iter().filter(|o| *o == m).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = nz.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let all = (1u64 << n) as f64;
    (2.0 * (le.min(ge) as f64 / all)).min(1.0)
}

pub fn random_points<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect()
}

/// Random mutually non-dominated points in `[0, 1]^m`.
pub fn random_front<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<f64>> {
    let pts = random_points(rng, n, m);
    let ranks = brute_ranks(&pts);
    pts.into_iter().zip(ranks).filter(|(_, r)| *r == 0).map(|(p, _)| p).collect()
}

pub fn nearest(points: &[Vec<f64>], q: &[f64]) -> usize {
    let d = |p: &[f64]| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    (0..points.len()).min_by(|&i, &j| d(&points[i]).total_cmp(&d(&points[j]))).unwrap()
}

// Infill score oracles, written out independently of the library.

pub fn decision_distance(x: &[f64], archive: &Archive, b: &BoundsBox) -> f64 {
    let mut best = f64::INFINITY;
    for s in archive.samples() {
        let mut sum = 0.0;
        for j in 0..x.len() {
            let w = b.upper()[j] - b.lower()[j];
            let d = (x[j] - b.lower()[j]) / w - (s.x[j] - b.lower()[j]) / w;
            sum += d * d;
        }
        best = best.min(sum.sqrt());
    }
    best
}

pub fn objective_distance(f: &[f64], archive: &Archive) -> f64 {
    let m = f.len();
    let lo: Vec<f64> = (0..m).map(|k| archive.samples().iter().map(|s| s.f[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..m).map(|k| archive.samples().iter().map(|s| s.f[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let scale = |v: f64, k: usize| (v - lo[k]) / if hi[k] > lo[k] { hi[k] - lo[k] } else { 1.0 };
    let mut best = f64::INFINITY;
    for s in archive.samples() {
        let mut sum = 0.0;
        for k in 0..m {
            let d = scale(f[k], k) - scale(s.f[k], k);
            sum += d * d;
        }
        best = best.min(sum.sqrt());
    }
    best
}

pub fn hv_gain(f: &[f64], archive: &Archive, reference: &[f64]) -> f64 {
    let front: Vec<Vec<f64>> = archive.first_front().into_iter().map(|i| archive.get(i).f.clone()).collect();
    if f.iter().zip(reference).any(|(v, r)| v >= r)
        || front.iter().any(|p| p.iter().zip(f).all(|(a, b)| a <= b))
    {
        return 0.0;
    }
    let mut with = front.clone();
    with.push(f.to_vec());
    (hypervolume(&with, reference).unwrap() - hypervolume(&front, reference).unwrap()).max(0.0)
}

/// The pool entry a greedy first pick must take.
pub fn pool_argmax(pool: &CandidatePool) -> usize {
    let mut best: Option<usize> = None;
    for (i, e) in pool.entries.iter().enumerate() {
        if e.eligible && !e.duplicate && best.is_none_or(|b| e.score > pool.entries[b].score) {
            best = Some(i);
        }
    }
    best.expect("pool has a selectable entry")
}
