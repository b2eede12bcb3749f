use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{dominates_unchecked, euclidean};

/// Points sampled from a problem's true Pareto front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFront {
    points: Vec<Vec<f64>>,
}

impl ReferenceFront {
    /// Validates that there are at least two mutually non-dominated points.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::contract("a reference front needs at least two points"));
        }
        let m = points[0].len();
        if points.iter().any(|p| p.len() != m) {
            return Err(Error::contract("reference points of differing dimension"));
        }
        for (i, a) in points.iter().enumerate() {
            if let Some(j) = points.iter().position(|b| dominates_unchecked(b, a)) {
                return Err(Error::contract(format!("reference point {i} is dominated by point {j}")));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_objectives(&self) -> usize {
        self.points[0].len()
    }
}

/// Mean distance from each reference point to its nearest solution.
pub fn igd(reference: &ReferenceFront, solutions: &[Vec<f64>]) -> Result<f64> {
    if solutions.is_empty() {
        return Err(Error::contract("IGD needs at least one solution"));
    }
    let m = reference.num_objectives();
    if solutions.iter().any(|s| s.len() != m) {
        return Err(Error::contract("solutions and reference front differ in dimension"));
    }
    let total: f64 = reference
        .points()
        .iter()
        .map(|p| solutions.iter().map(|q| euclidean(p, q)).fold(f64::INFINITY, f64::min))
        .sum();
    Ok(total / reference.len() as f64)
}
