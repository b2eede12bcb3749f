use serde::{Deserialize, Serialize};

use crate::error::{Error, FitError, Result};
use crate::kernel::{euclidean, squared_euclidean};

/// How the smoothing parameter is chosen at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SigmaPolicy {
    /// Mean distance from each pattern to its nearest other pattern; 1 when
    /// that is zero or undefined.
    #[default]
    MeanNearestNeighbor,
    Fixed(f64),
}

/// Probabilistic neural network: one Parzen density per class label.
#[derive(Debug, Clone, PartialEq)]
pub struct PnnModel {
    /// Sorted by label; every class holds at least one pattern.
    classes: Vec<(u32, Vec<Vec<f64>>)>,
    sigma: f64,
    dim: usize,
}

impl PnnModel {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn labels(&self) -> Vec<u32> {
        self.classes.iter().map(|(l, _)| *l).collect()
    }

    pub fn class_size(&self, label: u32) -> usize {
        self.classes.iter().find(|(l, _)| *l == label).map_or(0, |(_, p)| p.len())
    }

    /// Class-conditional densities `p_i(x)` in label order.
    ///
    /// With `normalized` the Gaussian normalization constant
    /// `(2 pi)^(d/2) sigma^d` is applied; it is identical for every class and
    /// leaves the prediction unchanged. These values underflow for small
    /// sigma; prediction works in the log domain instead.
    pub fn densities(&self, x: &[f64], normalized: bool) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let scale = if normalized {
            let d = self.dim as f64;
            1.0 / ((2.0 * std::f64::consts::PI).powf(d / 2.0) * self.sigma.powf(d))
        } else {
            1.0
        };
        let two_s2 = 2.0 * self.sigma * self.sigma;
        Ok(self
            .classes
            .iter()
            .map(|(_, patterns)| {
                let sum: f64 = patterns.iter().map(|c| (-squared_euclidean(x, c) / two_s2).exp()).sum();
                scale * sum / patterns.len() as f64
            })
            .collect())
    }

    /// `ln p_i(x)` (unnormalized) in label order, computed stably.
    pub fn log_densities(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.log_densities_unchecked(x))
    }

    fn log_densities_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let two_s2 = 2.0 * self.sigma * self.sigma;
        self.classes
            .iter()
            .map(|(_, patterns)| {
                let exps: Vec<f64> = patterns.iter().map(|c| -squared_euclidean(x, c) / two_s2).collect();
                let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = exps.iter().map(|e| (e - top).exp()).sum();
                top + sum.ln() - (patterns.len() as f64).ln()
            })
            .collect()
    }

    /// The label with the largest density; ties go to the smaller label.
    pub fn predict(&self, x: &[f64]) -> Result<u32> {
        self.check_dim(x)?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> u32 {
        let scores = self.log_densities_unchecked(x);
        let mut best = 0;
        for (i, s) in scores.iter().enumerate().skip(1) {
            if *s > scores[best] {
                best = i;
            }
        }
        self.classes[best].0
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::contract(format!(
                "query has dimension {}, model expects {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

pub fn pnn_fit(x: &[Vec<f64>], labels: &[u32], sigma: SigmaPolicy) -> Result<PnnModel> {
    if x.is_empty() {
        return Err(Error::contract("cannot fit a classifier on no patterns"));
    }
    if x.len() != labels.len() {
        return Err(Error::contract(format!("{} patterns but {} labels", x.len(), labels.len())));
    }
    let dim = x[0].len();
    if x.iter().any(|p| p.len() != dim) {
        return Err(Error::contract("patterns of differing dimension"));
    }
    let sigma = match sigma {
        SigmaPolicy::Fixed(s) if s > 0.0 && s.is_finite() => s,
        SigmaPolicy::Fixed(s) => return Err(FitError::InvalidParameter(format!("sigma {s}")).into()),
        SigmaPolicy::MeanNearestNeighbor => mean_nearest_neighbor(x).filter(|s| *s > 0.0).unwrap_or(1.0),
    };
    let mut classes: Vec<(u32, Vec<Vec<f64>>)> = Vec::new();
    for (p, &l) in x.iter().zip(labels) {
        match classes.iter_mut().find(|(c, _)| *c == l) {
            Some((_, members)) => members.push(p.clone()),
            None => classes.push((l, vec![p.clone()])),
        }
    }
    classes.sort_by_key(|(l, _)| *l);
    Ok(PnnModel { classes, sigma, dim })
}

pub fn pnn_predict(model: &PnnModel, x: &[f64]) -> Result<u32> {
    model.predict(x)
}

fn mean_nearest_neighbor(x: &[Vec<f64>]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let total: f64 = x
        .iter()
        .enumerate()
        .map(|(i, a)| {
            x.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| euclidean(a, b))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Some(total / x.len() as f64)
}
