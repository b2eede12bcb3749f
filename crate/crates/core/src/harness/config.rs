use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::RunConfig;
use crate::problems::{ExternalEvaluatorSpec, ProblemSpec};

/// The objective function of a job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    Benchmark(ProblemSpec),
    External(ExternalProblem),
}

/// An external evaluator with a display name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalProblem {
    #[serde(default = "external_name")]
    pub name: String,
    #[serde(flatten)]
    pub spec: ExternalEvaluatorSpec,
}

fn external_name() -> String {
    "external".into()
}

impl ProblemConfig {
    pub fn name(&self) -> String {
        match self {
            ProblemConfig::Benchmark(p) => p.name(),
            ProblemConfig::External(e) => e.name.clone(),
        }
    }

    pub fn num_objectives(&self) -> usize {
        match self {
            ProblemConfig::Benchmark(p) => p.num_objectives(),
            ProblemConfig::External(e) => e.spec.m,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ProblemConfig::Benchmark(p) => p.dim(),
            ProblemConfig::External(e) => e.spec.d,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Unique name; also the job's output subdirectory.
    pub id: String,
    /// Label used to pair jobs in comparisons; defaults to the variant name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub run: RunConfig,
    /// Fixed reference point for the reported hypervolume. Benchmarks with
    /// two or three objectives default to 1.1 times the true front's nadir.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hv_reference: Option<Vec<f64>>,
    /// Points on the analytic front used for IGD (benchmarks only); 1000 for
    /// two objectives and 990 for three by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_front_size: Option<usize>,
}

impl JobConfig {
    pub fn group(&self) -> String {
        self.group.clone().unwrap_or_else(|| {
            serde_json::to_value(self.run.variant)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default()
        })
    }
}

/// Two groups to test against each other on every problem both ran.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub jobs: Vec<JobConfig>,
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    /// Run `k` of every job uses seed `base_seed + k`.
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub comparisons: Vec<ComparisonConfig>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Worker threads for independent runs.
    #[serde(default = "default_threads")]
    pub threads: usize,
}

fn default_runs() -> usize {
    20
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_alpha() -> f64 {
    0.05
}

fn default_threads() -> usize {
    1
}

/// Command-line replacements for config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub base_seed: Option<u64>,
    pub n_runs: Option<usize>,
    /// Keep only these job ids.
    pub jobs: Option<Vec<String>>,
    pub threads: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses and validates a config document. Errors carry the line and
    /// column (and, for unknown or missing fields, the field name).
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(s) = o.base_seed {
            self.base_seed = s;
        }
        if let Some(n) = o.n_runs {
            self.n_runs = n;
        }
        if let Some(t) = o.threads {
            self.threads = t;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
        if let Some(keep) = &o.jobs {
            if let Some(missing) = keep.iter().find(|id| !self.jobs.iter().any(|j| &j.id == *id)) {
                return Err(Error::Config(format!("no job with id `{missing}`")));
            }
            self.jobs.retain(|j| keep.contains(&j.id));
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::Config("n_runs must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        let mut ids = HashSet::new();
        let mut cells = HashSet::new();
        for (k, job) in self.jobs.iter().enumerate() {
            let at = |m: String| Error::Config(format!("jobs[{k}] (`{}`): {m}", job.id));
            if job.id.is_empty() || job.id.contains(['/', '\\']) || job.id.starts_with('.') {
                return Err(at("id must be a plain, non-empty directory name".into()));
            }
            if !ids.insert(job.id.clone()) {
                return Err(at("duplicate job id".into()));
            }
            if !cells.insert((job.group(), job.problem.name())) {
                return Err(at(format!("group `{}` already has a job on {}", job.group(), job.problem.name())));
            }
            if let ProblemConfig::External(e) = &job.problem {
                e.spec.validate().map_err(|e| at(e.to_string()))?;
            }
            job.run
                .validate(job.problem.dim(), job.problem.num_objectives())
                .map_err(|e| at(e.to_string()))?;
            if let Some(r) = &job.hv_reference {
                if r.len() != job.problem.num_objectives() {
                    return Err(at(format!(
                        "hv_reference has {} coordinates for {} objectives",
                        r.len(),
                        job.problem.num_objectives()
                    )));
                }
            }
            if job.reference_front_size == Some(0) {
                return Err(at("reference_front_size must be positive".into()));
            }
        }
        for (k, c) in self.comparisons.iter().enumerate() {
            for side in [&c.a, &c.b] {
                if !self.jobs.iter().any(|j| &j.group() == side) {
                    return Err(Error::Config(format!("comparisons[{k}]: no job in group `{side}`")));
                }
            }
        }
        Ok(())
    }
}
