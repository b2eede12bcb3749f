//! Multi-seed experiments: JSON configuration, trace and table exports,
//! and paired Wilcoxon comparisons.
//!
//! A configuration lists jobs, each a problem plus a [`RunConfig`]; run `k`
//! of every job uses seed `base_seed + k`.
//!
//! ```json
//! {
//!   "n_runs": 5,
//!   "base_seed": 0,
//!   "output_dir": "out",
//!   "jobs": [
//!     {"id": "dtlz2", "problem": {"benchmark": {"family": "dtlz", "id": 2, "m": 2, "d": 30}}},
//!     {"id": "dtlz2-s1", "problem": {"benchmark": {"family": "dtlz", "id": 2, "m": 2, "d": 30}},
//!      "run": {"variant": "s1"}}
//!   ],
//!   "comparisons": [{"a": "full", "b": "s1"}]
//! }
//! ```
//!
//! [`RunConfig`]: crate::optimizer::RunConfig

mod config;
mod export;
mod runner;
mod stats;

pub use config::{ComparisonConfig, ExperimentConfig, ExternalProblem, JobConfig, Overrides, ProblemConfig};
pub use export::{Trace, TraceHeader, TraceLine};
pub use runner::{
    collect_runs, comparisons_csv, default_front_size, job_observers, read_traces, run_experiment, summary_csv,
    write_summary, ExperimentReport, RunFailureNote, COMPARISONS, CONFIG_COPY, SUMMARY,
};
pub use stats::{
    aggregate_stats, compare_groups, compare_runs, wilcoxon_signed_rank, Describe, JobRuns, JobStats, Metric,
    ProblemComparison, VerdictCounts, Verdict, WilcoxonOutcome, EXACT_LIMIT, MIN_PAIRS,
};

use std::path::Path;

use crate::error::Result;

/// Tests the jobs of two output directories against each other, pairing
/// jobs by problem and runs by index. Verdicts read from `a`'s side.
pub fn compare_dirs(
    a: &Path,
    b: &Path,
    metric: Metric,
    alpha: f64,
) -> Result<(Vec<ProblemComparison>, VerdictCounts)> {
    let ra = collect_runs(&read_traces(a)?);
    let rb = collect_runs(&read_traces(b)?);
    compare_groups(&ra.iter().collect::<Vec<_>>(), &rb.iter().collect::<Vec<_>>(), metric, alpha)
}
