//! The outer optimization loop: Latin hypercube initialization, one
//! bootstrap evaluation per objective extreme, then repeated rounds of
//! pre-screening, hypervolume search and sparse local search until the
//! evaluation budget is spent.
//!
//! ```
//! use clmea::optimizer::{run, Observers, RunConfig};
//! use clmea::problems::ProblemSpec;
//! use clmea::strategies::StrategyParams;
//!
//! let mut problem = ProblemSpec::zdt(1, 5)?;
//! let config = RunConfig {
//!     n_init: Some(20),
//!     max_fes: 30,
//!     strategy: StrategyParams { np: 10, max_gen1: 5, max_gen2: 3, ..Default::default() },
//!     ..Default::default()
//! };
//! let result = run(&mut problem, &config, &Observers::default()).map_err(|e| e.error)?;
//! assert_eq!(result.archive.len(), 30);
//! assert_eq!(result.trace.len(), 30);
//! # Ok::<(), clmea::Error>(())
//! ```

mod bootstrap;

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{hypervolume, igd, ReferenceFront};
use crate::kernel::{derive_rng, latin_hypercube_sample, Archive, EvaluatedSample, SeededRng};
use crate::problems::Evaluator;
use crate::strategies::{
    classifier_rank_prescreen, hv_nondominated_search, sparse_local_search, InfillBatch, StrategyParams, StrategyTag,
};

/// Which strategies the loop runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// All three strategies in turn.
    #[default]
    Full,
    /// Pre-screening only.
    S1,
    /// Hypervolume search only.
    S2,
    /// Sparse local search only.
    S3,
}

impl Variant {
    pub fn phases(self) -> &'static [StrategyTag] {
        match self {
            Variant::Full => &[StrategyTag::Prescreen, StrategyTag::HvSearch, StrategyTag::LocalSearch],
            Variant::S1 => &[StrategyTag::Prescreen],
            Variant::S2 => &[StrategyTag::HvSearch],
            Variant::S3 => &[StrategyTag::LocalSearch],
        }
    }
}

/// How each objective's extreme point is proposed before the main loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapMode {
    /// Minimize that objective's RBF with differential evolution.
    #[default]
    SurrogateDe,
    /// Mutate the archived minimizer of that objective.
    ArchiveScan,
}

/// Differential evolution used by [`BootstrapMode::SurrogateDe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapDe {
    pub population: usize,
    pub generations: usize,
    /// Mutation scale; `None` reuses the strategy's `mu`.
    pub scale: Option<f64>,
    pub crossover_rate: f64,
}

impl Default for BootstrapDe {
    fn default() -> Self {
        Self { population: 50, generations: 50, scale: None, crossover_rate: 0.9 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Initial Latin hypercube samples; `None` picks 100 below 100 variables
    /// and 200 from there on.
    pub n_init: Option<usize>,
    /// Total number of real evaluations.
    pub max_fes: usize,
    pub strategy: StrategyParams,
    pub variant: Variant,
    pub seed: u64,
    pub bootstrap: BootstrapMode,
    pub bootstrap_de: BootstrapDe,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_init: None,
            max_fes: 300,
            strategy: StrategyParams::default(),
            variant: Variant::Full,
            seed: 0,
            bootstrap: BootstrapMode::SurrogateDe,
            bootstrap_de: BootstrapDe::default(),
        }
    }
}

impl RunConfig {
    pub fn n_init_for(&self, dim: usize) -> usize {
        self.n_init.unwrap_or(if dim < 100 { 100 } else { 200 })
    }

    /// Checks the configuration against a problem's size.
    pub fn validate(&self, dim: usize, num_objectives: usize) -> Result<()> {
        self.strategy.validate()?;
        let n_init = self.n_init_for(dim);
        if n_init < 2 {
            return Err(Error::Config(format!("at least 2 initial samples are required, got {n_init}")));
        }
        if n_init + num_objectives > self.max_fes {
            return Err(Error::Config(format!(
                "budget of {} evaluations cannot cover {n_init} initial samples and {num_objectives} extremes",
                self.max_fes
            )));
        }
        if self.bootstrap == BootstrapMode::SurrogateDe && self.bootstrap_de.population < 4 {
            return Err(Error::Config("bootstrap population must be at least 4".into()));
        }
        Ok(())
    }
}

/// Indicators tracked after every evaluation.
#[derive(Debug, Clone, Default)]
pub struct Observers {
    pub reference_front: Option<ReferenceFront>,
    /// Fixed hypervolume reference point.
    pub hv_reference: Option<Vec<f64>>,
}

/// One real evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub fe_index: usize,
    pub tag: StrategyTag,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// IGD of the archive's first front after this evaluation.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub igd: Option<f64>,
    /// Hypervolume of the archive's first front after this evaluation.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hv: Option<f64>,
}

/// Wall-clock seconds spent per phase, including the evaluations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub init: f64,
    pub bootstrap: f64,
    pub prescreen: f64,
    pub hv_search: f64,
    pub local_search: f64,
}

impl PhaseTimings {
    fn add(&mut self, tag: StrategyTag, seconds: f64) {
        match tag {
            StrategyTag::Init => self.init += seconds,
            StrategyTag::Bootstrap => self.bootstrap += seconds,
            StrategyTag::Prescreen => self.prescreen += seconds,
            StrategyTag::HvSearch => self.hv_search += seconds,
            StrategyTag::LocalSearch => self.local_search += seconds,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub archive: Archive,
    pub trace: Vec<TraceRecord>,
    /// Loop iterations in which every phase of the variant ran.
    pub iterations: usize,
    pub timings: PhaseTimings,
}

impl RunResult {
    pub(crate) fn empty() -> Self {
        Self { archive: Archive::new(), trace: Vec::new(), iterations: 0, timings: PhaseTimings::default() }
    }

    /// The archive's non-dominated samples, in archive order.
    pub fn nondominated(&self) -> Vec<EvaluatedSample> {
        self.archive.first_front().into_iter().map(|i| self.archive.get(i).clone()).collect()
    }

    /// Rebuilds the archive from trace records alone.
    pub fn archive_from_trace(trace: &[TraceRecord]) -> Result<Archive> {
        let mut archive = Archive::new();
        for r in trace {
            archive.push(r.x.clone(), r.f.clone())?;
        }
        Ok(archive)
    }
}

/// A run that stopped on an error, with everything evaluated before it.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<RunResult>,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} evaluations)", self.error, self.partial.archive.len())
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Evaluates candidates and keeps the trace and indicators in step with the
/// archive.
struct Session<'a, E: Evaluator + ?Sized> {
    problem: &'a mut E,
    observers: &'a Observers,
    result: RunResult,
}

impl<E: Evaluator + ?Sized> Session<'_, E> {
    fn evaluate(&mut self, x: Vec<f64>, tag: StrategyTag) -> Result<()> {
        let fe_index = self.result.archive.len() + 1;
        let f = self.problem.evaluate(&x, fe_index)?;
        if f.len() != self.problem.num_objectives() || f.iter().any(|v| !v.is_finite()) {
            return Err(Error::EvalFailure {
                fe_index,
                message: format!("unusable objective vector {f:?}"),
            });
        }
        self.result.archive.push(x.clone(), f.clone())?;
        let (igd, hv) = self.indicators()?;
        self.result.trace.push(TraceRecord { fe_index, tag, x, f, igd, hv });
        Ok(())
    }

    fn indicators(&self) -> Result<(Option<f64>, Option<f64>)> {
        if self.observers.reference_front.is_none() && self.observers.hv_reference.is_none() {
            return Ok((None, None));
        }
        let archive = &self.result.archive;
        let front: Vec<Vec<f64>> = archive.first_front().into_iter().map(|i| archive.get(i).f.clone()).collect();
        let igd = self.observers.reference_front.as_ref().map(|r| igd(r, &front)).transpose()?;
        let hv = self.observers.hv_reference.as_ref().map(|r| hypervolume(&front, r)).transpose()?;
        Ok((igd, hv))
    }

    fn budget_left(&self, max_fes: usize) -> usize {
        max_fes.saturating_sub(self.result.archive.len())
    }
}

/// Evaluates `n_init` Latin hypercube points.
pub fn initialize<E: Evaluator + ?Sized>(problem: &mut E, config: &RunConfig) -> Result<Archive, RunFailure> {
    let observers = Observers::default();
    let mut session = Session { problem, observers: &observers, result: RunResult::empty() };
    match init_phase(&mut session, config) {
        Ok(()) => Ok(session.result.archive),
        Err(error) => Err(RunFailure { error, partial: Box::new(session.result) }),
    }
}

fn init_phase<E: Evaluator + ?Sized>(session: &mut Session<'_, E>, config: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let bounds = session.problem.bounds().clone();
    let mut rng = derive_rng(config.seed, "init", 0);
    let n = config.n_init_for(bounds.dim());
    for x in latin_hypercube_sample(n, &bounds, &mut rng) {
        session.evaluate(x, StrategyTag::Init)?;
    }
    session.result.timings.add(StrategyTag::Init, started.elapsed().as_secs_f64());
    Ok(())
}

/// Evaluates one proposed minimizer per objective and appends it.
pub fn bootstrap_extremes<E: Evaluator + ?Sized>(
    archive: Archive,
    problem: &mut E,
    config: &RunConfig,
) -> Result<Archive, RunFailure> {
    let observers = Observers::default();
    let mut result = RunResult::empty();
    result.archive = archive;
    let mut session = Session { problem, observers: &observers, result };
    match bootstrap_phase(&mut session, config, usize::MAX) {
        Ok(()) => Ok(session.result.archive),
        Err(error) => Err(RunFailure { error, partial: Box::new(session.result) }),
    }
}

fn bootstrap_phase<E: Evaluator + ?Sized>(session: &mut Session<'_, E>, config: &RunConfig, max_fes: usize) -> Result<()> {
    if session.result.archive.len() < 2 {
        return Err(Error::contract("bootstrapping extremes needs at least 2 archived samples"));
    }
    let started = Instant::now();
    let bounds = session.problem.bounds().clone();
    for objective in 0..session.problem.num_objectives() {
        if session.budget_left(max_fes) == 0 {
            break;
        }
        let mut rng = derive_rng(config.seed, "bootstrap", objective as u64);
        let x = bootstrap::extreme_candidate(&session.result.archive, objective, config, &bounds, &mut rng)?;
        session.evaluate(x, StrategyTag::Bootstrap)?;
    }
    session.result.timings.add(StrategyTag::Bootstrap, started.elapsed().as_secs_f64());
    Ok(())
}

fn strategy_batch(
    tag: StrategyTag,
    archive: &Archive,
    params: &StrategyParams,
    bounds: &crate::kernel::BoundsBox,
    rng: &mut SeededRng,
) -> Result<InfillBatch> {
    match tag {
        StrategyTag::Prescreen => classifier_rank_prescreen(archive, params, bounds, rng),
        StrategyTag::HvSearch => hv_nondominated_search(archive, params, bounds, rng),
        StrategyTag::LocalSearch => sparse_local_search(archive, params, bounds, rng),
        StrategyTag::Init | StrategyTag::Bootstrap => unreachable!("not a loop phase"),
    }
}

/// Runs the configured variant to the end of the budget.
///
/// Every generator is derived from `config.seed` and a per-phase label, so
/// the result depends only on the problem and the configuration.
pub fn run<E: Evaluator + ?Sized>(
    problem: &mut E,
    config: &RunConfig,
    observers: &Observers,
) -> Result<RunResult, RunFailure> {
    let mut session = Session { problem, observers, result: RunResult::empty() };
    match drive(&mut session, config) {
        Ok(()) => Ok(session.result),
        Err(error) => Err(RunFailure { error, partial: Box::new(session.result) }),
    }
}

/// [`run`] with the variant overridden.
pub fn run_variant<E: Evaluator + ?Sized>(
    problem: &mut E,
    config: &RunConfig,
    variant: Variant,
    observers: &Observers,
) -> Result<RunResult, RunFailure> {
    let config = RunConfig { variant, ..config.clone() };
    run(problem, &config, observers)
}

fn drive<E: Evaluator + ?Sized>(session: &mut Session<'_, E>, config: &RunConfig) -> Result<()> {
    let bounds = session.problem.bounds().clone();
    config.validate(bounds.dim(), session.problem.num_objectives())?;
    init_phase(session, config)?;
    bootstrap_phase(session, config, config.max_fes)?;

    let mut iteration = 0u64;
    while session.budget_left(config.max_fes) > 0 {
        let mut complete = true;
        for &tag in config.variant.phases() {
            let left = session.budget_left(config.max_fes);
            if left == 0 {
                complete = false;
                break;
            }
            let started = Instant::now();
            let mut rng = derive_rng(config.seed, tag.as_str(), iteration);
            let batch = strategy_batch(tag, &session.result.archive, &config.strategy, &bounds, &mut rng)?;
            for x in batch.candidates.into_iter().take(left) {
                session.evaluate(x, tag)?;
            }
            session.result.timings.add(tag, started.elapsed().as_secs_f64());
        }
        if complete {
            session.result.iterations += 1;
        }
        iteration += 1;
    }
    Ok(())
}
