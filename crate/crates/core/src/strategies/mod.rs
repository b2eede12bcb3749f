//! The three infill strategies run once per outer iteration:
//!
//! * [`classifier_rank_prescreen`] breeds offspring from classifier-predicted
//!   top ranks and evaluates the one farthest from the archive in decision
//!   space.
//! * [`hv_nondominated_search`] evolves a population on RBF predictions and
//!   evaluates the member with the largest hypervolume improvement.
//! * [`sparse_local_search`] refines the sparsest region of the archive's
//!   front with local surrogates and evaluates the member farthest from the
//!   archive in objective space.
//!
//! Each returns an [`InfillBatch`] that records the scored pool the
//! candidates were picked from, so the choice can be checked after the fact.

mod hv_search;
mod local_search;
mod prescreen;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, FitError, Result};
use crate::indicators::ReferencePointPolicy;
use crate::kernel::{
    euclidean, is_duplicate, latin_hypercube_sample, polynomial_mutation, sbx_crossover, Archive, BoundsBox,
    RankedPopulation,
};
use crate::surrogates::{RbfSet, SigmaPolicy, WidthPolicy};

pub use hv_search::hv_nondominated_search;
pub use local_search::{select_sparse_points, sparse_local_search};
pub use prescreen::classifier_rank_prescreen;

/// Which phase produced a real evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyTag {
    Init,
    Bootstrap,
    Prescreen,
    HvSearch,
    LocalSearch,
}

impl StrategyTag {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyTag::Init => "init",
            StrategyTag::Bootstrap => "bootstrap",
            StrategyTag::Prescreen => "prescreen",
            StrategyTag::HvSearch => "hv_search",
            StrategyTag::LocalSearch => "local_search",
        }
    }
}

impl fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// SBX and polynomial-mutation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationParams {
    pub eta_c: f64,
    pub p_c: f64,
    pub eta_m: f64,
    /// `None` means `1 / D`.
    pub p_m: Option<f64>,
    /// Binomial crossover rate applied after the rank-based DE mutation.
    pub de_crossover_rate: f64,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self { eta_c: 20.0, p_c: 1.0, eta_m: 20.0, p_m: None, de_crossover_rate: 0.9 }
    }
}

impl VariationParams {
    pub fn mutation_rate(&self, dim: usize) -> f64 {
        self.p_m.unwrap_or(1.0 / dim as f64)
    }
}

/// Surrogate construction settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogatePolicy {
    pub width: WidthPolicy,
    pub sigma: SigmaPolicy,
    pub regularization: f64,
    /// Fit each RBF on standardized targets so predictions far from the data
    /// fall back to the sample mean rather than zero. Off by default: the
    /// plain interpolant decays to zero away from the samples.
    pub standardize_targets: bool,
}

impl Default for SurrogatePolicy {
    fn default() -> Self {
        Self {
            width: WidthPolicy::MedianPairwise,
            sigma: SigmaPolicy::MeanNearestNeighbor,
            regularization: 1e-10,
            standardize_targets: false,
        }
    }
}

/// Replaces the RBF surrogates with a known function. Used to test the
/// search logic in isolation from model error.
#[derive(Clone)]
pub struct ExactObjectives(pub Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>);

impl ExactObjectives {
    pub fn new<F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static>(f: F) -> Self {
        Self(Arc::new(f))
    }
}

impl fmt::Debug for ExactObjectives {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactObjectives(..)")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyParams {
    /// Population size.
    pub np: usize,
    /// Candidates returned per strategy call.
    pub n_infill: usize,
    /// Generations of the surrogate-driven search.
    pub max_gen1: usize,
    /// Generations of each local search.
    pub max_gen2: usize,
    /// Scale factor of the rank-based mutation.
    pub mu: f64,
    /// Stop breeding once this share of offspring is predicted rank 1.
    pub first_rank_threshold: f64,
    pub prescreen_max_loops: usize,
    /// Archive points used to fit each local surrogate; `None` picks 100
    /// below 100 variables and 200 from there on.
    pub local_train_size: Option<usize>,
    pub variation: VariationParams,
    pub surrogate: SurrogatePolicy,
    pub reference_point: ReferencePointPolicy,
    #[serde(skip)]
    pub exact_objectives: Option<ExactObjectives>,
}

impl Default for StrategyParams {
    fn default() -> Self {
        Self {
            np: 50,
            n_infill: 1,
            max_gen1: 50,
            max_gen2: 10,
            mu: 0.5,
            first_rank_threshold: 0.9,
            prescreen_max_loops: 20,
            local_train_size: None,
            variation: VariationParams::default(),
            surrogate: SurrogatePolicy::default(),
            reference_point: ReferencePointPolicy::default(),
            exact_objectives: None,
        }
    }
}

impl StrategyParams {
    pub fn validate(&self) -> Result<()> {
        if self.np < 4 {
            return Err(Error::Config(format!("population size must be at least 4, got {}", self.np)));
        }
        if self.n_infill == 0 {
            return Err(Error::Config("at least one infill candidate per strategy is required".into()));
        }
        if !(self.first_rank_threshold > 0.0 && self.first_rank_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "first_rank_threshold must lie in (0, 1], got {}",
                self.first_rank_threshold
            )));
        }
        if self.prescreen_max_loops == 0 {
            return Err(Error::Config("prescreen_max_loops must be positive".into()));
        }
        Ok(())
    }

    pub fn local_train_size_for(&self, dim: usize) -> usize {
        self.local_train_size.unwrap_or(if dim < 100 { 100 } else { 200 })
    }
}

/// One scored member of a strategy's final candidate pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub x: Vec<f64>,
    /// Surrogate-predicted objectives, where the strategy uses them.
    pub predicted: Option<Vec<f64>>,
    /// The strategy's selection score (larger is better).
    pub score: f64,
    /// Whether the entry may be selected at all.
    pub eligible: bool,
    /// Whether the entry coincides with an archived decision vector.
    pub duplicate: bool,
}

/// The scored pool behind one or more candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePool {
    pub entries: Vec<PoolEntry>,
    /// Hypervolume reference point used for the scores, if any.
    pub reference_point: Option<Vec<f64>>,
    /// Archive index of the sparse front member the pool was grown around.
    pub sparse_point: Option<usize>,
    /// Archive indices the local surrogate was trained on.
    pub training_set: Option<Vec<usize>>,
    /// How the scores were computed.
    pub score_kind: ScoreKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// Normalized decision-space distance to the archive.
    DecisionDistance,
    /// Hypervolume improvement over the archive's first front.
    HvImprovement,
    /// Normalized objective-space distance to the archive.
    ObjectiveDistance,
}

/// Candidates chosen for real evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfillBatch {
    pub tag: StrategyTag,
    pub candidates: Vec<Vec<f64>>,
    pub scores: Vec<f64>,
    /// Index into `pools` for each candidate.
    pub candidate_pool: Vec<usize>,
    /// Whether a candidate is a fresh Latin hypercube point standing in for
    /// a pool made entirely of archive duplicates.
    pub substituted: Vec<bool>,
    pub pools: Vec<CandidatePool>,
    /// Breeding rounds used by the pre-screening loop.
    pub loops: usize,
    /// Whether the pre-screening loop stopped on its threshold.
    pub threshold_met: bool,
}

impl InfillBatch {
    fn new(tag: StrategyTag) -> Self {
        Self {
            tag,
            candidates: Vec::new(),
            scores: Vec::new(),
            candidate_pool: Vec::new(),
            substituted: Vec::new(),
            pools: Vec::new(),
            loops: 0,
            threshold_met: false,
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Picks up to `n` entries of `pool` by descending score (ties by pool
    /// order), skipping ineligible entries and anything that duplicates the
    /// archive or an earlier pick. Falls back to fresh Latin hypercube points
    /// when the pool runs dry.
    fn take_best<R: Rng + ?Sized>(
        &mut self,
        pool: CandidatePool,
        n: usize,
        archive: &Archive,
        bounds: &BoundsBox,
        rng: &mut R,
    ) {
        let pool_index = self.pools.len();
        let mut order: Vec<usize> = (0..pool.entries.len()).filter(|&i| pool.entries[i].eligible).collect();
        order.sort_by(|&a, &b| pool.entries[b].score.total_cmp(&pool.entries[a].score).then(a.cmp(&b)));
        let mut taken = 0;
        for i in order {
            if taken == n {
                break;
            }
            let e = &pool.entries[i];
            if e.duplicate || self.candidates.iter().any(|c| is_duplicate(c, &e.x)) {
                continue;
            }
            self.candidates.push(e.x.clone());
            self.scores.push(e.score);
            self.candidate_pool.push(pool_index);
            self.substituted.push(false);
            taken += 1;
        }
        while taken < n {
            let x = fresh_point(archive, &self.candidates, bounds, rng);
            self.candidates.push(x);
            self.scores.push(0.0);
            self.candidate_pool.push(pool_index);
            self.substituted.push(true);
            taken += 1;
        }
        self.pools.push(pool);
    }
}

fn fresh_point<R: Rng + ?Sized>(archive: &Archive, taken: &[Vec<f64>], bounds: &BoundsBox, rng: &mut R) -> Vec<f64> {
    loop {
        let x = latin_hypercube_sample(1, bounds, rng).pop().expect("one point");
        if !archive.contains(&x) && !taken.iter().any(|c| is_duplicate(c, &x)) {
            return x;
        }
    }
}

/// Minimum distance from `u` to any archived decision vector, measured in
/// the unit cube spanned by `bounds`.
pub fn decision_space_uncertainty(u: &[f64], archive: &Archive, bounds: &BoundsBox) -> Result<f64> {
    if archive.is_empty() {
        return Err(Error::contract("decision-space uncertainty needs a non-empty archive"));
    }
    let nu = bounds.normalize(u);
    Ok(archive
        .samples()
        .iter()
        .map(|s| euclidean(&nu, &bounds.normalize(&s.x)))
        .fold(f64::INFINITY, f64::min))
}

/// Per-objective min-max scaling of the archive's objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveScaling {
    pub min: Vec<f64>,
    pub range: Vec<f64>,
}

impl ObjectiveScaling {
    pub fn of(archive: &Archive) -> Result<Self> {
        let m = archive
            .num_objectives()
            .ok_or_else(|| Error::contract("objective scaling needs a non-empty archive"))?;
        let mut min = vec![f64::INFINITY; m];
        let mut max = vec![f64::NEG_INFINITY; m];
        for s in archive {
            for k in 0..m {
                min[k] = min[k].min(s.f[k]);
                max[k] = max[k].max(s.f[k]);
            }
        }
        let range = min.iter().zip(&max).map(|(lo, hi)| if hi > lo { hi - lo } else { 1.0 }).collect();
        Ok(Self { min, range })
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        f.iter().enumerate().map(|(k, v)| (v - self.min[k]) / self.range[k]).collect()
    }
}

/// Minimum distance from a predicted objective vector to the archived ones,
/// after min-max scaling each objective over the archive.
pub fn objective_space_uncertainty(f_hat: &[f64], archive: &Archive) -> Result<f64> {
    let scaling = ObjectiveScaling::of(archive)?;
    Ok(objective_distance(f_hat, archive, &scaling))
}

fn objective_distance(f_hat: &[f64], archive: &Archive, scaling: &ObjectiveScaling) -> f64 {
    let q = scaling.apply(f_hat);
    archive
        .samples()
        .iter()
        .map(|s| euclidean(&q, &scaling.apply(&s.f)))
        .fold(f64::INFINITY, f64::min)
}

/// Objective predictions over raw decision vectors.
pub(crate) enum Predictor {
    Rbf { set: RbfSet, bounds: BoundsBox, mean: Vec<f64>, scale: Vec<f64> },
    Exact(ExactObjectives),
}

impl Predictor {
    /// Fits one RBF per objective on `(xs[i], ys[i])`, escalating the
    /// regularization when the kernel system is singular.
    pub(crate) fn fit(xs: &[Vec<f64>], ys: &[Vec<f64>], params: &StrategyParams, bounds: &BoundsBox) -> Result<Self> {
        if let Some(exact) = &params.exact_objectives {
            return Ok(Predictor::Exact(exact.clone()));
        }
        let policy = &params.surrogate;
        let m = ys.first().map_or(0, Vec::len);
        let k = ys.len() as f64;
        let mut mean = vec![0.0; m];
        let mut scale = vec![1.0; m];
        if policy.standardize_targets {
            for j in 0..m {
                mean[j] = ys.iter().map(|y| y[j]).sum::<f64>() / k;
                let var = ys.iter().map(|y| (y[j] - mean[j]).powi(2)).sum::<f64>() / k;
                if var > 0.0 {
                    scale[j] = var.sqrt();
                }
            }
        }
        let targets: Vec<Vec<f64>> =
            (0..m).map(|j| ys.iter().map(|y| (y[j] - mean[j]) / scale[j]).collect()).collect();
        let centers: Vec<Vec<f64>> = xs.iter().map(|x| bounds.normalize(x)).collect();
        let mut reg = policy.regularization;
        loop {
            match RbfSet::fit(&centers, &targets, policy.width, reg) {
                Ok(set) => return Ok(Predictor::Rbf { set, bounds: bounds.clone(), mean, scale }),
                Err(FitError::Singular) if reg < 1e-4 => reg = (reg * 100.0).max(1e-8),
                Err(e) => return Err(e.into()),
            }
        }
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Predictor::Rbf { set, bounds, mean, scale } => set
                .predict_unchecked(&bounds.normalize(x))
                .into_iter()
                .enumerate()
                .map(|(j, v)| mean[j] + scale[j] * v)
                .collect(),
            Predictor::Exact(f) => (f.0)(x),
        }
    }
}

/// Binary tournament on (front, crowding), then SBX and polynomial mutation,
/// until `count` children exist.
pub(crate) fn breed<R: Rng + ?Sized>(
    parents: &[Vec<f64>],
    parent_objectives: &[Vec<f64>],
    count: usize,
    variation: &VariationParams,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let ranked = RankedPopulation::rank(parent_objectives)?;
    let better = |a: usize, b: usize| {
        (ranked.front_index[a], std::cmp::Reverse(ordered(ranked.crowding[a])))
            <= (ranked.front_index[b], std::cmp::Reverse(ordered(ranked.crowding[b])))
    };
    let tournament = |rng: &mut R| {
        let a = rng.random_range(0..parents.len());
        let b = rng.random_range(0..parents.len());
        if better(a, b) {
            a
        } else {
            b
        }
    };
    let mut children = Vec::with_capacity(count + 1);
    while children.len() < count {
        let p1 = tournament(rng);
        let p2 = tournament(rng);
        let (c1, c2) = sbx_crossover(&parents[p1], &parents[p2], variation.eta_c, variation.p_c, bounds, rng);
        children.push(mutate(&c1, variation, bounds, rng));
        children.push(mutate(&c2, variation, bounds, rng));
    }
    children.truncate(count);
    Ok(children)
}

pub(crate) fn mutate<R: Rng + ?Sized>(x: &[f64], variation: &VariationParams, bounds: &BoundsBox, rng: &mut R) -> Vec<f64> {
    polynomial_mutation(x, variation.eta_m, variation.mutation_rate(bounds.dim()), bounds, rng)
}

/// Total order key for crowding distances (which may be infinite).
fn ordered(v: f64) -> u64 {
    // Non-negative floats order like their bit patterns.
    v.max(0.0).to_bits()
}
