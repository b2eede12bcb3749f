use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::indicators::{ReferenceFront, ReferencePointPolicy};
use crate::optimizer::{run, Observers, RunConfig};
use crate::problems::{pareto_front_reference, ExternalEvaluator, ProblemSpec};

use super::config::{ExperimentConfig, JobConfig, ProblemConfig};
use super::export::{Trace, TraceHeader};
use super::stats::{aggregate_stats, compare_groups, JobRuns, JobStats, Metric, ProblemComparison, VerdictCounts};

/// Name of the copy of the resolved configuration in the output directory.
pub const CONFIG_COPY: &str = "experiment.json";
pub const SUMMARY: &str = "summary.csv";
pub const COMPARISONS: &str = "comparisons.csv";

/// A run that did not finish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunFailureNote {
    pub job: String,
    pub run: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub output_dir: PathBuf,
    pub runs: usize,
    pub failures: Vec<RunFailureNote>,
    pub stats: Vec<JobStats>,
}

/// Default IGD reference-front size for `m` objectives.
pub fn default_front_size(m: usize) -> usize {
    if m == 2 {
        1000
    } else {
        990
    }
}

/// Indicator observers for a job: the analytic front for benchmarks, and
/// the configured (or default) hypervolume reference point.
pub fn job_observers(job: &JobConfig) -> Result<Observers> {
    let mut observers = Observers { reference_front: None, hv_reference: job.hv_reference.clone() };
    if let ProblemConfig::Benchmark(spec) = &job.problem {
        let size = job.reference_front_size.unwrap_or_else(|| default_front_size(spec.num_objectives()));
        let front = pareto_front_reference(spec, size)?;
        if observers.hv_reference.is_none() && (2..=3).contains(&spec.num_objectives()) {
            observers.hv_reference = Some(default_hv_reference(&front));
        }
        observers.reference_front = Some(front);
    }
    if observers.hv_reference.as_ref().is_some_and(|r| !(2..=3).contains(&r.len())) {
        observers.hv_reference = None;
    }
    Ok(observers)
}

fn default_hv_reference(front: &ReferenceFront) -> Vec<f64> {
    ReferencePointPolicy::default().place(front.points().iter().map(Vec::as_slice))
}

/// Runs every (job, run) pair of `config` and writes, under its output
/// directory:
///
/// * `experiment.json`, the resolved configuration;
/// * `<job>/run_<k>.trace.ndjson`, `<job>/run_<k>.convergence.csv` and
///   `<job>/run_<k>.timings.json` per run;
/// * `summary.csv` and, when comparisons are configured, `comparisons.csv`,
///   both computed from the trace files.
///
/// A failing run is written up to the failure and reported; it does not stop
/// the others.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let out = &config.output_dir;
    fs::create_dir_all(out)?;
    fs::write(out.join(CONFIG_COPY), serde_json::to_string_pretty(config)? + "\n")?;

    let observers: Vec<Observers> = config.jobs.iter().map(job_observers).collect::<Result<_>>()?;
    let tasks: Vec<(usize, usize)> =
        (0..config.jobs.len()).flat_map(|j| (0..config.n_runs).map(move |r| (j, r))).collect();
    for job in &config.jobs {
        let dir = out.join(&job.id);
        if dir.exists() {
            for entry in fs::read_dir(&dir)? {
                let path = entry?.path();
                if path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("run_")) {
                    fs::remove_file(path)?;
                }
            }
        }
        fs::create_dir_all(dir)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let outcomes: Vec<Result<Option<RunFailureNote>>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(j, r)| execute(config, j, r, &observers[j]))
            .collect()
    });
    let mut failures = Vec::new();
    for o in outcomes {
        if let Some(f) = o? {
            failures.push(f);
        }
    }

    let stats = write_summary(out)?;
    Ok(ExperimentReport { output_dir: out.clone(), runs: tasks.len(), failures, stats })
}

fn execute(config: &ExperimentConfig, j: usize, r: usize, observers: &Observers) -> Result<Option<RunFailureNote>> {
    let job = &config.jobs[j];
    let seed = config.base_seed.wrapping_add(r as u64);
    let run_config = RunConfig { seed, ..job.run.clone() };
    let header = TraceHeader {
        job: job.id.clone(),
        job_index: j,
        group: job.group(),
        problem: job.problem.name(),
        variant: job.run.variant,
        run: r,
        seed,
        num_objectives: job.problem.num_objectives(),
        dim: job.problem.dim(),
        hv_reference: observers.hv_reference.clone(),
        reference_front_size: observers.reference_front.as_ref().map(ReferenceFront::len),
    };
    let outcome = match &job.problem {
        ProblemConfig::Benchmark(spec) => {
            let mut p: ProblemSpec = spec.clone();
            run(&mut p, &run_config, observers)
        }
        ProblemConfig::External(e) => match ExternalEvaluator::spawn(e.spec.clone()) {
            Ok(mut p) => run(&mut p, &run_config, observers),
            Err(error) => Err(crate::optimizer::RunFailure {
                error,
                partial: Box::new(crate::optimizer::RunResult::empty()),
            }),
        },
    };
    let (trace, timings, failure) = match outcome {
        Ok(result) => (
            Trace { header, records: result.trace, error: None, iterations: Some(result.iterations) },
            result.timings,
            None,
        ),
        Err(f) => {
            let message = f.error.to_string();
            let partial = *f.partial;
            (
                Trace { header, records: partial.trace, error: Some(message.clone()), iterations: None },
                partial.timings,
                Some(RunFailureNote { job: job.id.clone(), run: r, message }),
            )
        }
    };
    let dir = config.output_dir.join(&job.id);
    fs::write(dir.join(format!("run_{r}.trace.ndjson")), trace.to_ndjson())?;
    fs::write(dir.join(format!("run_{r}.convergence.csv")), trace.convergence_csv())?;
    fs::write(dir.join(format!("run_{r}.timings.json")), serde_json::to_string_pretty(&timings)? + "\n")?;
    Ok(failure)
}

/// Every trace file below `dir`, parsed, ordered by job position and run.
pub fn read_traces(dir: &Path) -> Result<Vec<Trace>> {
    let mut traces = Vec::new();
    let mut subdirs: Vec<PathBuf> =
        fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
    subdirs.sort();
    for sub in subdirs {
        let mut files: Vec<PathBuf> = fs::read_dir(&sub)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.to_str().is_some_and(|s| s.ends_with(".trace.ndjson")))
            .collect();
        files.sort();
        for f in files {
            traces.push(Trace::read(&f)?);
        }
    }
    traces.sort_by(|a, b| (a.header.job_index, a.header.run).cmp(&(b.header.job_index, b.header.run)));
    Ok(traces)
}

/// Groups traces into per-job final indicator values.
pub fn collect_runs(traces: &[Trace]) -> Vec<JobRuns> {
    let mut jobs: Vec<JobRuns> = Vec::new();
    for t in traces {
        let h = &t.header;
        let pos = match jobs.iter().position(|j| j.job == h.job) {
            Some(p) => p,
            None => {
                jobs.push(JobRuns {
                    job: h.job.clone(),
                    group: h.group.clone(),
                    problem: h.problem.clone(),
                    ..Default::default()
                });
                jobs.len() - 1
            }
        };
        let j = &mut jobs[pos];
        if !t.completed() {
            j.failed += 1;
            continue;
        }
        j.completed.push(h.run);
        if let Some(v) = t.final_igd() {
            j.igd.push(v);
        }
        if let Some(v) = t.final_hv() {
            j.hv.push(v);
        }
    }
    jobs
}

const SUMMARY_HEADER: &str =
    "job,group,problem,completed,failed,igd_mean,igd_median,igd_std,igd_best,hv_mean,hv_median,hv_std,hv_best\n";

/// The summary table for `stats`.
pub fn summary_csv(stats: &[JobStats]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    let num = |v: Option<f64>| v.map(|v| format!("{v:.6e}")).unwrap_or_default();
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.job,
            s.group,
            s.problem,
            s.completed,
            s.failed,
            num(s.igd.map(|d| d.mean)),
            num(s.igd.map(|d| d.median)),
            num(s.igd.map(|d| d.std)),
            s.best_igd as u8,
            num(s.hv.map(|d| d.mean)),
            num(s.hv.map(|d| d.median)),
            num(s.hv.map(|d| d.std)),
            s.best_hv as u8,
        );
    }
    out
}

/// Recomputes `summary.csv` (and `comparisons.csv` when the copied config
/// lists comparisons) from the trace files under `dir`.
pub fn write_summary(dir: &Path) -> Result<Vec<JobStats>> {
    let traces = read_traces(dir)?;
    let runs = collect_runs(&traces);
    let stats = aggregate_stats(&runs);
    fs::write(dir.join(SUMMARY), summary_csv(&stats))?;

    let config_path = dir.join(CONFIG_COPY);
    if config_path.exists() {
        let config = ExperimentConfig::load(&config_path)?;
        if !config.comparisons.is_empty() {
            let mut rows = Vec::new();
            let mut counts = Vec::new();
            for c in &config.comparisons {
                let side = |g: &str| runs.iter().filter(|j| j.group == g).collect::<Vec<_>>();
                for metric in [Metric::Igd, Metric::Hv] {
                    let (r, n) = compare_groups(&side(&c.a), &side(&c.b), metric, config.alpha)?;
                    rows.extend(r);
                    counts.push(n);
                }
            }
            fs::write(dir.join(COMPARISONS), comparisons_csv(&rows, &counts))?;
        }
    }
    Ok(stats)
}

/// Per-problem rows followed by one tally row per comparison and metric
/// (problem column `all`).
pub fn comparisons_csv(rows: &[ProblemComparison], counts: &[VerdictCounts]) -> String {
    let mut out = String::from("a,b,problem,metric,pairs,w_plus,w_minus,p_value,exact,insufficient,verdict\n");
    for r in rows {
        let o = &r.outcome;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6e},{},{},{}",
            r.a,
            r.b,
            r.problem,
            r.metric.as_str(),
            r.pairs,
            o.w_plus,
            o.w_minus,
            o.p_value,
            o.exact,
            o.insufficient,
            r.verdict
        );
    }
    for c in counts {
        let _ = writeln!(
            out,
            "{},{},all,{},,,,,,,+{}/-{}/≈{}",
            c.a,
            c.b,
            c.metric.as_str(),
            c.better,
            c.worse,
            c.tie
        );
    }
    out
}
