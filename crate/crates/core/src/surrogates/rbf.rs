use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, FitError, Result};
use crate::kernel::{euclidean, squared_euclidean, DUPLICATE_TOLERANCE};

/// How the Gaussian width is chosen at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WidthPolicy {
    /// Median distance over all pairs of centers; 1 when that is zero or
    /// there is only one center.
    #[default]
    MedianPairwise,
    Fixed(f64),
}

/// Gaussian radial basis interpolant `sum_i w_i * exp(-(|x - c_i| / width)^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfModel {
    centers: Vec<Vec<f64>>,
    weights: Vec<f64>,
    width: f64,
    regularization: f64,
}

impl RbfModel {
    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_dim(&self.centers, x)?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        let inv_w2 = 1.0 / (self.width * self.width);
        self.centers
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * (-squared_euclidean(x, c) * inv_w2).exp())
            .sum()
    }
}

/// Fits an interpolant by solving `(Phi + regularization * I) w = y`.
pub fn rbf_fit(x: &[Vec<f64>], y: &[f64], width: WidthPolicy, regularization: f64) -> Result<RbfModel, FitError> {
    let mut set = RbfSet::fit(x, &[y.to_vec()], width, regularization)?;
    Ok(RbfModel {
        centers: set.centers,
        weights: set.weights.pop().expect("one output"),
        width: set.width,
        regularization,
    })
}

pub fn rbf_predict(model: &RbfModel, x: &[f64]) -> Result<f64> {
    model.predict(x)
}

/// Several interpolants sharing one set of centers and one kernel matrix,
/// one per output column.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfSet {
    centers: Vec<Vec<f64>>,
    /// `weights[k]` belongs to output `k`.
    weights: Vec<Vec<f64>>,
    width: f64,
}

impl RbfSet {
    /// `targets[k][i]` is output `k` at center `i`.
    pub fn fit(
        x: &[Vec<f64>],
        targets: &[Vec<f64>],
        width: WidthPolicy,
        regularization: f64,
    ) -> Result<Self, FitError> {
        let k = x.len();
        if k == 0 {
            return Err(FitError::Empty);
        }
        if let Some(t) = targets.iter().find(|t| t.len() != k) {
            return Err(FitError::LengthMismatch { inputs: k, targets: t.len() });
        }
        if !(regularization >= 0.0) {
            return Err(FitError::InvalidParameter(format!("regularization {regularization}")));
        }
        let dim = x[0].len();
        if x.iter().any(|c| c.len() != dim) {
            return Err(FitError::InvalidParameter("centers of differing dimension".into()));
        }
        let mut distances = Vec::with_capacity(k * (k - 1) / 2);
        for i in 0..k {
            for j in (i + 1)..k {
                let d = euclidean(&x[i], &x[j]);
                if d < DUPLICATE_TOLERANCE {
                    return Err(FitError::DuplicateCenters { first: i, second: j });
                }
                distances.push(d);
            }
        }
        let width = match width {
            WidthPolicy::Fixed(w) if w > 0.0 && w.is_finite() => w,
            WidthPolicy::Fixed(w) => return Err(FitError::InvalidParameter(format!("width {w}"))),
            WidthPolicy::MedianPairwise => median(&mut distances).filter(|m| *m > 0.0).unwrap_or(1.0),
        };

        let inv_w2 = 1.0 / (width * width);
        let phi = DMatrix::from_fn(k, k, |i, j| {
            let v = if i == j { 1.0 } else { (-squared_euclidean(&x[i], &x[j]) * inv_w2).exp() };
            if i == j {
                v + regularization
            } else {
                v
            }
        });
        let weights = solve(&phi, targets)?;
        Ok(Self { centers: x.to_vec(), weights, width })
    }

    pub fn outputs(&self) -> usize {
        self.weights.len()
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    /// Predicts every output at `x`.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(&self.centers, x)?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let inv_w2 = 1.0 / (self.width * self.width);
        let basis: Vec<f64> = self
            .centers
            .iter()
            .map(|c| (-squared_euclidean(x, c) * inv_w2).exp())
            .collect();
        self.weights
            .iter()
            .map(|w| w.iter().zip(&basis).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn check_dim(centers: &[Vec<f64>], x: &[f64]) -> Result<()> {
    let dim = centers[0].len();
    if x.len() != dim {
        return Err(Error::contract(format!("query has dimension {}, model expects {dim}", x.len())));
    }
    Ok(())
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { 0.5 * (values[n / 2 - 1] + values[n / 2]) })
}

fn solve(phi: &DMatrix<f64>, targets: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FitError> {
    let k = phi.nrows();
    let lu = phi.clone().lu();
    let chol = phi.clone().cholesky();
    targets
        .iter()
        .map(|t| {
            let y = DVector::from_column_slice(t);
            let first = match &chol {
                Some(c) => Some(c.solve(&y)),
                None => lu.solve(&y),
            };
            let mut w = first.ok_or(FitError::Singular)?;
            // One round of iterative refinement tightens the interpolation
            // residual on ill-conditioned kernels.
            let residual = &y - phi * &w;
            let correction = match &chol {
                Some(c) => Some(c.solve(&residual)),
                None => lu.solve(&residual),
            };
            if let Some(c) = correction {
                if c.iter().all(|v| v.is_finite()) {
                    w += c;
                }
            }
            if w.len() != k || w.iter().any(|v| !v.is_finite()) {
                return Err(FitError::Singular);
            }
            Ok(w.iter().copied().collect())
        })
        .collect()
}
