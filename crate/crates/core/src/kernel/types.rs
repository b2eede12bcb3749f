use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two decision vectors closer than this (Euclidean) are the same point.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Axis-aligned box of feasible decision vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds")]
pub struct BoundsBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawBounds> for BoundsBox {
    type Error = Error;

    fn try_from(raw: RawBounds) -> Result<Self> {
        BoundsBox::new(raw.lower, raw.upper)
    }
}

impl BoundsBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::contract(format!(
                "bounds need equal non-zero lengths (lower {}, upper {})",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i]) || !lower[i].is_finite() || !upper[i].is_finite()) {
            return Err(Error::contract(format!(
                "bound {i}: lower {} must be finite and below upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The box `[lower, upper]^dim`.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    /// Clips every component to the nearest bound.
    pub fn clip(&self, x: &mut [f64]) {
        for (v, (&lo, &hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(lo, hi);
        }
    }

    /// Maps `x` into the unit cube.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| (v - self.lower[i]) / self.width(i))
            .collect()
    }

    pub fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(i, &v)| self.lower[i] + v * self.width(i))
            .collect()
    }
}

/// A decision vector with its truly evaluated objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedSample {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// 1-based ordinal of the real evaluation that produced `f`.
    pub fe_index: usize,
}

/// Every truly evaluated sample, in evaluation order.
///
/// The archive is append-only and rejects decision vectors that duplicate an
/// existing entry, so its length is always the number of evaluations spent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    samples: Vec<EvaluatedSample>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[EvaluatedSample] {
        &self.samples
    }

    pub fn get(&self, i: usize) -> &EvaluatedSample {
        &self.samples[i]
    }

    pub fn num_objectives(&self) -> Option<usize> {
        self.samples.first().map(|s| s.f.len())
    }

    /// Index of an archived sample within [`DUPLICATE_TOLERANCE`] of `x`.
    pub fn find_duplicate(&self, x: &[f64]) -> Option<usize> {
        self.samples.iter().position(|s| is_duplicate(&s.x, x))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.find_duplicate(x).is_some()
    }

    /// Appends a sample and returns its `fe_index`.
    pub fn push(&mut self, x: Vec<f64>, f: Vec<f64>) -> Result<usize> {
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("objective vector has non-finite components"));
        }
        if let Some(m) = self.num_objectives() {
            if f.len() != m {
                return Err(Error::contract(format!("expected {m} objectives, got {}", f.len())));
            }
        }
        if let Some(i) = self.find_duplicate(&x) {
            return Err(Error::contract(format!(
                "decision vector duplicates archive entry {}",
                self.samples[i].fe_index
            )));
        }
        let fe_index = self.samples.len() + 1;
        self.samples.push(EvaluatedSample { x, f, fe_index });
        Ok(fe_index)
    }

    pub fn decisions(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.x.clone()).collect()
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.f.clone()).collect()
    }

    /// Archive members on the first non-domination front, in archive order.
    pub fn first_front(&self) -> Vec<usize> {
        if self.is_empty() {
            return Vec::new();
        }
        let objs = self.objectives();
        super::nondominated_sort(&objs)
            .map(|fronts| fronts.into_iter().next().unwrap_or_default())
            .unwrap_or_default()
    }
}

impl<'a> IntoIterator for &'a Archive {
    type Item = &'a EvaluatedSample;
    type IntoIter = std::slice::Iter<'a, EvaluatedSample>;

    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn is_duplicate(a: &[f64], b: &[f64]) -> bool {
    euclidean(a, b) < DUPLICATE_TOLERANCE
}

/// Front membership and crowding for a population.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPopulation {
    /// 1-based non-domination level per member.
    pub front_index: Vec<usize>,
    /// Crowding distance of each member within its own front.
    pub crowding: Vec<f64>,
}

impl RankedPopulation {
    pub fn rank(objectives: &[Vec<f64>]) -> Result<Self> {
        let fronts = super::nondominated_sort(objectives)?;
        let mut front_index = vec![0; objectives.len()];
        let mut crowding = vec![0.0; objectives.len()];
        for (level, front) in fronts.iter().enumerate() {
            let members: Vec<Vec<f64>> = front.iter().map(|&i| objectives[i].clone()).collect();
            let dist = super::crowding_distance(&members);
            for (&i, d) in front.iter().zip(dist) {
                front_index[i] = level + 1;
                crowding[i] = d;
            }
        }
        Ok(Self { front_index, crowding })
    }

    pub fn len(&self) -> usize {
        self.front_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.front_index.is_empty()
    }

    /// Member indices ordered by front, then descending crowding, then input order.
    pub fn preference_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.front_index[a]
                .cmp(&self.front_index[b])
                .then_with(|| self.crowding[b].total_cmp(&self.crowding[a]))
                .then_with(|| a.cmp(&b))
        });
        order
    }
}
