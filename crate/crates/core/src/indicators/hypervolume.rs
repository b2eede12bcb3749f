use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::weakly_dominates;

/// How the optimizer places its hypervolume reference point: the
/// componentwise maximum of the points involved, scaled by `scale` where
/// positive and shifted by `shift` where not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferencePointPolicy {
    pub scale: f64,
    pub shift: f64,
}

impl Default for ReferencePointPolicy {
    fn default() -> Self {
        Self { scale: 1.1, shift: 0.1 }
    }
}

impl ReferencePointPolicy {
    /// Reference point for a collection of objective vectors.
    pub fn place<'a, I>(&self, points: I) -> Vec<f64>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut worst: Vec<f64> = Vec::new();
        for p in points {
            if worst.is_empty() {
                worst = p.to_vec();
            } else {
                for (w, v) in worst.iter_mut().zip(p) {
                    *w = w.max(*v);
                }
            }
        }
        worst
            .into_iter()
            .map(|w| if w > 0.0 { w * self.scale } else { w + self.shift })
            .collect()
    }
}

/// Exact hypervolume dominated by `front` and bounded by `reference`.
///
/// Points not strictly better than the reference in every objective add
/// nothing. Two objectives use a sort-and-sweep, three slice along the last
/// objective and sweep each slab.
pub fn hypervolume(front: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    let m = reference.len();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    if let Some(p) = front.iter().find(|p| p.len() != m) {
        return Err(Error::contract(format!(
            "point of dimension {} against a {m}-dimensional reference",
            p.len()
        )));
    }
    let mut pts: Vec<&[f64]> = front
        .iter()
        .map(Vec::as_slice)
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v < r))
        .collect();
    if pts.is_empty() {
        return Ok(0.0);
    }
    if m == 2 {
        return Ok(sweep_2d(&mut pts, reference));
    }

    pts.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut volume = 0.0;
    let mut slab: Vec<&[f64]> = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        slab.push(pts[i]);
        let top = if i + 1 < pts.len() { pts[i + 1][2] } else { reference[2] };
        let height = top - pts[i][2];
        if height > 0.0 {
            volume += height * sweep_2d(&mut slab, reference);
        }
    }
    Ok(volume)
}

/// Area dominated in the first two objectives; reorders `pts`.
fn sweep_2d(pts: &mut [&[f64]], reference: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in pts.iter() {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// Monte Carlo hypervolume over the box `[min(front), reference]`.
///
/// Returns the estimate and its standard error. Works for any number of
/// objectives.
pub fn mc_hypervolume<R: Rng + ?Sized>(
    front: &[Vec<f64>],
    reference: &[f64],
    n_samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let pts: Vec<&Vec<f64>> = front
        .iter()
        .filter(|p| p.len() == reference.len() && p.iter().zip(reference).all(|(v, r)| v < r))
        .collect();
    if pts.is_empty() || n_samples == 0 {
        return (0.0, 0.0);
    }
    let lower: Vec<f64> = (0..reference.len())
        .map(|k| pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let box_volume: f64 = lower.iter().zip(reference).map(|(l, r)| r - l).product();
    if !(box_volume > 0.0) {
        return (0.0, 0.0);
    }
    let mut sample = vec![0.0; reference.len()];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        for (k, s) in sample.iter_mut().enumerate() {
            *s = rng.random_range(lower[k]..reference[k]);
        }
        if pts.iter().any(|p| weakly_dominates(p, &sample)) {
            hits += 1;
        }
    }
    let p = hits as f64 / n_samples as f64;
    (box_volume * p, box_volume * (p * (1.0 - p) / n_samples as f64).sqrt())
}

/// Hypervolume gained by adding `candidate` to `front`.
///
/// Exactly zero when the candidate is weakly dominated by a front member or
/// not strictly inside the reference box.
pub fn hv_improvement(front: &[Vec<f64>], candidate: &[f64], reference: &[f64]) -> Result<f64> {
    if candidate.len() != reference.len() {
        return Err(Error::contract("candidate and reference differ in dimension"));
    }
    if candidate.iter().zip(reference).any(|(c, r)| c >= r)
        || front.iter().any(|p| weakly_dominates(p, candidate))
    {
        return Ok(0.0);
    }
    let before = hypervolume(front, reference)?;
    let mut extended = front.to_vec();
    extended.push(candidate.to_vec());
    let after = hypervolume(&extended, reference)?;
    Ok((after - before).max(0.0))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn hv_examples() {
        assert_eq!(hypervolume(&[vec![1.0, 1.0]], &[2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(hypervolume(&[vec![1.0, 2.0], vec![2.0, 1.0]], &[3.0, 3.0]).unwrap(), 3.0);
        assert_eq!(hypervolume(&[vec![0.0, 0.0, 0.0]], &[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(
            hypervolume(&[vec![0.0, 0.0, 0.0], vec![0.5, 0.5, 0.5]], &[1.0, 1.0, 1.0]).unwrap(),
            1.0
        );
        assert_eq!(hypervolume(&[], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(hypervolume(&[vec![1.0, 0.0]], &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn hv_three_objective_staircase() {
        // Union of [0,2]x[0,1]x[0,1] and [0,1]x[0,2]x[0,1] and [0,1]x[0,1]x[0,2]
        // inside the 2-cube: 3 unit-volume arms plus the shared unit cube.
        let front = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert!((hypervolume(&front, &[2.0, 2.0, 2.0]).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hv_rejects_many_objectives() {
        assert!(matches!(
            hypervolume(&[vec![0.0; 4]], &[1.0; 4]),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn mc_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(mc_hypervolume(&[], &[2.0, 2.0], 100, &mut rng), (0.0, 0.0));
        let (est, se) = mc_hypervolume(&[vec![1.0, 1.0]], &[2.0, 2.0], 1_000_000, &mut rng);
        assert!((est - 1.0).abs() <= 3.0 * se.max(1e-12));
    }

    #[test]
    fn improvement_examples() {
        let front = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        let r = [3.0, 3.0];
        assert_eq!(hv_improvement(&front, &[1.0, 1.0], &r).unwrap(), 1.0);
        assert_eq!(hv_improvement(&front, &[2.5, 2.5], &r).unwrap(), 0.0);
        assert_eq!(hv_improvement(&front, &[1.0, 2.0], &r).unwrap(), 0.0);
        assert_eq!(hv_improvement(&front, &[0.5, 3.5], &r).unwrap(), 0.0);
        assert!(hv_improvement(&front, &[0.5, 2.5], &r).unwrap() > 0.0);
    }

    #[test]
    fn adaptive_reference_point() {
        let p = ReferencePointPolicy::default();
        let pts = [vec![1.0, -2.0, 0.0], vec![2.0, -3.0, -1.0]];
        let r = p.place(pts.iter().map(Vec::as_slice));
        assert!((r[0] - 2.2).abs() < 1e-12);
        assert!((r[1] - (-1.9)).abs() < 1e-12);
        assert!((r[2] - 0.1).abs() < 1e-12);
    }
}
