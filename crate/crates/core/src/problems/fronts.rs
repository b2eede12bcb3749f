//! Analytic Pareto fronts sampled evenly along their arc length (two
//! objectives) or on a simplex lattice (three objectives).

use std::f64::consts::PI;

use crate::error::Result;
use crate::indicators::ReferenceFront;

use super::benchmarks::zdt6_f1;
use super::{Family, ProblemSpec};

/// Parameter grid size used to trace curves before resampling.
const DENSE: usize = 200_000;

/// At least `count` evenly spread points on the true front of `spec`.
pub fn pareto_front_reference(spec: &ProblemSpec, count: usize) -> Result<ReferenceFront> {
    let count = count.max(2);
    let points = match (spec.family(), spec.id(), spec.num_objectives()) {
        (Family::Zdt, 1 | 4, _) => curve(0.0, 1.0, count, |t| [t, 1.0 - t.sqrt()]),
        (Family::Zdt, 2, _) => curve(0.0, 1.0, count, |t| [t, 1.0 - t * t]),
        (Family::Zdt, 3, _) => curve(0.0, 1.0, count, |t| [t, 1.0 - t.sqrt() - t * (10.0 * PI * t).sin()]),
        (Family::Zdt, _, _) => curve(zdt6_min_f1(), 1.0, count, |t| [t, 1.0 - t * t]),
        (Family::Dtlz, 1, 2) => curve(0.0, 0.5, count, |t| [t, 0.5 - t]),
        (Family::Dtlz, 2..=6, 2) => curve(0.0, PI / 2.0, count, |t| [t.cos(), t.sin()]),
        (Family::Dtlz, 7, 2) => curve(0.0, 1.0, count, |t| [t, 4.0 - dtlz7_h(t)]),
        (Family::Dtlz, 1, _) => simplex_lattice(count).into_iter().map(|p| p.iter().map(|v| v * 0.5).collect()).collect(),
        (Family::Dtlz, 2..=4, _) => simplex_lattice(count)
            .into_iter()
            .map(|p| {
                let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                p.iter().map(|v| v / n).collect()
            })
            .collect(),
        (Family::Dtlz, 5 | 6, _) => (0..count)
            .map(|i| {
                let t = PI / 2.0 * i as f64 / (count - 1) as f64;
                let c = t.cos() * std::f64::consts::FRAC_1_SQRT_2;
                vec![c, c, t.sin()]
            })
            .collect(),
        (Family::Dtlz, _, _) => dtlz7_surface(count),
    };
    ReferenceFront::new(points)
}

fn dtlz7_h(t: f64) -> f64 {
    t * (1.0 + (3.0 * PI * t).sin())
}

/// Smallest attainable ZDT6 first objective.
pub fn zdt6_min_f1() -> f64 {
    // The minimum sits where sin(6 pi x) is near 1 on its first hump.
    let (mut a, mut b) = (0.0, 1.0 / 6.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if zdt6_f1(c) < zdt6_f1(d) {
            b = d;
        } else {
            a = c;
        }
    }
    zdt6_f1(0.5 * (a + b))
}

/// Traces `f` over `[lo, hi]`, keeps the non-dominated pieces and places at
/// least `count` points on them, equally spaced in arc length. Every point is
/// an exact evaluation of `f`.
fn curve<F: Fn(f64) -> [f64; 2]>(lo: f64, hi: f64, count: usize, f: F) -> Vec<Vec<f64>> {
    let ts: Vec<f64> = (0..=DENSE).map(|i| lo + (hi - lo) * i as f64 / DENSE as f64).collect();
    let pts: Vec<[f64; 2]> = ts.iter().map(|&t| f(t)).collect();

    // Non-dominated dense samples: sweep by first objective keeping new
    // minima of the second.
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(pts[a][1].total_cmp(&pts[b][1])));
    let mut keep = vec![false; pts.len()];
    let mut best = f64::INFINITY;
    for &i in &order {
        if pts[i][1] < best {
            keep[i] = true;
            best = pts[i][1];
        }
    }

    // Contiguous runs of kept parameters form the front's pieces.
    let mut pieces: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        if keep[i] {
            let start = i;
            while i + 1 < pts.len() && keep[i + 1] {
                i += 1;
            }
            if i > start {
                pieces.push((start, i));
            }
        }
        i += 1;
    }

    let seg_len = |a: usize, b: usize| ((pts[b][0] - pts[a][0]).powi(2) + (pts[b][1] - pts[a][1]).powi(2)).sqrt();
    let lengths: Vec<f64> = pieces
        .iter()
        .map(|&(s, e)| (s..e).map(|k| seg_len(k, k + 1)).sum())
        .collect();
    let total: f64 = lengths.iter().sum();

    let mut out = Vec::with_capacity(count + 2 * pieces.len());
    for (&(s, e), &len) in pieces.iter().zip(&lengths) {
        let n = ((count as f64 * len / total).ceil() as usize).max(2);
        let mut acc = 0.0;
        let mut k = s;
        for j in 0..n {
            let target = len * j as f64 / (n - 1) as f64;
            while k < e && acc + seg_len(k, k + 1) < target {
                acc += seg_len(k, k + 1);
                k += 1;
            }
            let t = if k >= e {
                ts[e]
            } else {
                let step = seg_len(k, k + 1);
                let frac = if step > 0.0 { ((target - acc) / step).clamp(0.0, 1.0) } else { 0.0 };
                ts[k] + frac * (ts[k + 1] - ts[k])
            };
            out.push(f(t).to_vec());
        }
    }
    out.dedup();
    nondominated_subset(out)
}

fn nondominated_subset(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let keep: Vec<bool> = points
        .iter()
        .map(|a| !points.iter().any(|b| crate::kernel::dominates_unchecked(b, a)))
        .collect();
    points.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect()
}

/// Smallest 3-objective simplex lattice with at least `count` points.
fn simplex_lattice(count: usize) -> Vec<Vec<f64>> {
    let mut h = 1;
    while (h + 1) * (h + 2) / 2 < count {
        h += 1;
    }
    let mut out = Vec::with_capacity((h + 1) * (h + 2) / 2);
    for i in 0..=h {
        for j in 0..=(h - i) {
            let k = h - i - j;
            out.push(vec![i as f64 / h as f64, j as f64 / h as f64, k as f64 / h as f64]);
        }
    }
    out
}

/// DTLZ7 with three objectives: `f1, f2` range over the product of the
/// record-setting intervals of `h(t) = t (1 + sin 3 pi t)`, and
/// `f3 = 6 - h(f1) - h(f2)`.
fn dtlz7_surface(count: usize) -> Vec<Vec<f64>> {
    let per_axis = (count as f64).sqrt().ceil() as usize;
    let axis: Vec<f64> = curve(0.0, 1.0, per_axis, |t| [t, 4.0 - dtlz7_h(t)])
        .into_iter()
        .map(|p| p[0])
        .collect();
    let mut out = Vec::with_capacity(axis.len() * axis.len());
    for &a in &axis {
        for &b in &axis {
            out.push(vec![a, b, 6.0 - dtlz7_h(a) - dtlz7_h(b)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zdt6_minimum() {
        let m = zdt6_min_f1();
        assert!((m - 0.2807753191).abs() < 1e-8, "{m}");
    }

    #[test]
    fn zdt1_front_closed_form_and_endpoints() {
        let f = pareto_front_reference(&ProblemSpec::zdt(1, 30).unwrap(), 1000).unwrap();
        assert!(f.len() >= 1000);
        assert!(f.points().iter().all(|p| (p[1] - (1.0 - p[0].sqrt())).abs() < 1e-12));
        assert!(f.points().contains(&vec![0.0, 1.0]));
        assert!(f.points().contains(&vec![1.0, 0.0]));
    }

    #[test]
    fn zdt3_has_five_pieces() {
        let f = pareto_front_reference(&ProblemSpec::zdt(3, 30).unwrap(), 500).unwrap();
        let mut pts = f.points().to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let jumps = pts.windows(2).filter(|w| w[1][0] - w[0][0] > 0.02).count();
        assert_eq!(jumps + 1, 5);
    }

    #[test]
    fn dtlz2_three_objective_unit_sphere() {
        let f = pareto_front_reference(&ProblemSpec::dtlz(2, 3, 12).unwrap(), 990).unwrap();
        assert_eq!(f.len(), 990);
        assert!(f.points().iter().all(|p| (p.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() < 1e-12));
    }
}
