//! The acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clmea::harness::{default_front_size, wilcoxon_signed_rank};
use clmea::indicators::{hypervolume, igd, mc_hypervolume, ReferenceFront};
use clmea::kernel::{derive_rng, latin_hypercube_sample, nondominated_sort, Archive, BoundsBox};
use clmea::optimizer::{run, run_variant, Observers, RunConfig, RunResult, Variant};
use clmea::problems::{pareto_front_reference, ExternalEvaluator, ExternalEvaluatorSpec, ProblemSpec};
use clmea::strategies::{
    classifier_rank_prescreen, hv_nondominated_search, sparse_local_search, InfillBatch, StrategyParams, StrategyTag,
};
use clmea::surrogates::{pnn_fit, rbf_fit, SigmaPolicy, WidthPolicy};
use clmea::Error;
use rand::Rng;

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    ensure(start.elapsed() < limit, format!("took {:.1?}, limit {limit:?}", start.elapsed()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for trial in 0..100u64 {
        let m = 2 + (trial % 2) as usize;
        let mut rng = derive_rng(trial, "c1", 0);
        let n = rng.random_range(1..=10);
        let f = common::random_front(&mut rng, n, m);
        let r = vec![1.1; m];
        let exact = hypervolume(&f, &r).map_err(|e| e.to_string())?;
        let (est, se) = mc_hypervolume(&f, &r, 20_000, &mut derive_rng(trial, "c1-mc", 0));
        ensure((exact - est).abs() <= 3.0 * se + 1e-12, format!("MC trial {trial}: {exact} vs {est} ± {se}"))?;
    }
    for trial in 0..100u64 {
        let mut rng = derive_rng(trial, "c1-ie", 0);
        let n = rng.random_range(1..=8);
        let f = common::random_front(&mut rng, n, 2);
        let exact = hypervolume(&f, &[1.1, 1.1]).map_err(|e| e.to_string())?;
        let ie = common::inclusion_exclusion_hv(&f, &[1.1, 1.1]);
        ensure((exact - ie).abs() < 1e-9, format!("inclusion-exclusion trial {trial}: {exact} vs {ie}"))?;
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("100 Monte Carlo and 100 inclusion-exclusion fronts in {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for trial in 0..1000u64 {
        let mut rng = derive_rng(trial, "c2", 0);
        let n = rng.random_range(1..=50);
        let m = rng.random_range(2..=3);
        let pts: Vec<Vec<f64>> =
            (0..n).map(|_| (0..m).map(|_| f64::from(rng.random_range(0..8u8))).collect()).collect();
        let fronts = nondominated_sort(&pts).map_err(|e| e.to_string())?;
        let ranks = common::brute_ranks(&pts);
        let mut got = vec![usize::MAX; n];
        for (level, front) in fronts.iter().enumerate() {
            for &i in front {
                got[i] = level;
            }
        }
        ensure(got == ranks, format!("instance {trial} disagrees"))?;
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("1000 instances in {:.2?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let mut rng = derive_rng(trial, "c3-rbf", 0);
        let n = rng.random_range(2..=30);
        // A dense 1-D set makes the unregularized Gaussian kernel singular
        // to working precision, so sets start at two variables.
        let d = rng.random_range(2..=20);
        let x = common::random_points(&mut rng, n, d);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let model = rbf_fit(&x, &y, WidthPolicy::MedianPairwise, 0.0).map_err(|e| e.to_string())?;
        for (xi, yi) in x.iter().zip(&y) {
            worst = worst.max((model.predict(xi).map_err(|e| e.to_string())? - yi).abs() / yi.abs().max(1.0));
        }
    }
    ensure(worst < 1e-6, format!("relative RBF error at a center {worst:e}"))?;
    let mut rng = derive_rng(0, "c3-pnn", 0);
    for set in 0..10u32 {
        let x = common::random_points(&mut rng, 40, 4);
        let labels: Vec<u32> = (0..40).map(|i| (i * 5 + set) % 3).collect();
        let model = pnn_fit(&x, &labels, SigmaPolicy::Fixed(1e-6)).map_err(|e| e.to_string())?;
        for q in common::random_points(&mut rng, 100, 4) {
            let want = labels[common::nearest(&x, &q)];
            ensure(model.predict(&q).map_err(|e| e.to_string())? == want, "PNN disagrees with nearest pattern")?;
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("max relative RBF center error {worst:.1e}; 1000 PNN queries; {:.2?}", start.elapsed()))
}

fn zdt1_archive(seed: u64) -> (ProblemSpec, Archive) {
    let p = ProblemSpec::zdt(1, 10).unwrap();
    let mut archive = Archive::new();
    for x in latin_hypercube_sample(40, p.bounds(), &mut derive_rng(seed, "c4", 0)) {
        let f = p.evaluate(&x).unwrap();
        archive.push(x, f).unwrap();
    }
    (p, archive)
}

fn argmax_consistent(batch: &InfillBatch, score: impl Fn(&clmea::strategies::PoolEntry) -> f64) -> Result<(), String> {
    let pool = &batch.pools[0];
    for (i, e) in pool.entries.iter().enumerate() {
        ensure(e.score == score(e), format!("pool entry {i}: logged {} vs recomputed {}", e.score, score(e)))?;
    }
    let best = common::pool_argmax(pool);
    ensure(batch.candidates[0] == pool.entries[best].x, "candidate is not the pool argmax")?;
    ensure(batch.scores[0] == pool.entries[best].score, "candidate score is not the pool maximum")
}

fn criterion_4() -> Outcome {
    let params = StrategyParams::default();
    for seed in 0..20 {
        let (p, archive) = zdt1_archive(seed);
        let b = p.bounds();
        let rng = || derive_rng(seed, "c4-strategy", 0);
        let batch = classifier_rank_prescreen(&archive, &params, b, &mut rng()).map_err(|e| e.to_string())?;
        argmax_consistent(&batch, |e| common::decision_distance(&e.x, &archive, b))
            .map_err(|m| format!("pre-screening, seed {seed}: {m}"))?;
        let batch = hv_nondominated_search(&archive, &params, b, &mut rng()).map_err(|e| e.to_string())?;
        let reference = batch.pools[0].reference_point.clone().unwrap();
        argmax_consistent(&batch, |e| common::hv_gain(e.predicted.as_ref().unwrap(), &archive, &reference))
            .map_err(|m| format!("hypervolume search, seed {seed}: {m}"))?;
        let batch = sparse_local_search(&archive, &params, b, &mut rng()).map_err(|e| e.to_string())?;
        ensure(archive.first_front().len() >= 2, "front too small for objective-space scores")?;
        argmax_consistent(&batch, |e| common::objective_distance(e.predicted.as_ref().unwrap(), &archive))
            .map_err(|m| format!("local search, seed {seed}: {m}"))?;
    }
    Ok("20 invocations of each strategy".into())
}

struct Study {
    full: Vec<(RunResult, Duration)>,
    rerun: RunResult,
    s1: Vec<RunResult>,
    s3: Vec<RunResult>,
    zdt2: Vec<RunResult>,
}

fn observers(p: &ProblemSpec) -> Observers {
    Observers { reference_front: Some(pareto_front_reference(p, default_front_size(2)).unwrap()), hv_reference: None }
}

fn study() -> Study {
    let dtlz2 = ProblemSpec::dtlz(2, 2, 30).unwrap();
    let zdt2 = ProblemSpec::zdt(2, 30).unwrap();
    let (od, oz) = (observers(&dtlz2), observers(&zdt2));
    let config = |seed| RunConfig { seed, max_fes: 300, ..Default::default() };
    let go = |p: &ProblemSpec, o: &Observers, seed, v| run_variant(&mut p.clone(), &config(seed), v, o).unwrap();
    let full = SEEDS
        .iter()
        .map(|&s| {
            let t = Instant::now();
            let r = run(&mut dtlz2.clone(), &config(s), &od).unwrap();
            (r, t.elapsed())
        })
        .collect();
    Study {
        full,
        rerun: go(&dtlz2, &od, SEEDS[0], Variant::Full),
        s1: SEEDS.iter().map(|&s| go(&dtlz2, &od, s, Variant::S1)).collect(),
        s3: SEEDS.iter().map(|&s| go(&dtlz2, &od, s, Variant::S3)).collect(),
        zdt2: SEEDS.iter().map(|&s| go(&zdt2, &oz, s, Variant::Full)).collect(),
    }
}

fn final_igd(r: &RunResult) -> f64 {
    r.trace.last().and_then(|t| t.igd).unwrap()
}

fn median(runs: &[&RunResult]) -> f64 {
    let mut v: Vec<f64> = runs.iter().map(|r| final_igd(r)).collect();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn fmt_igd(runs: &[&RunResult]) -> String {
    runs.iter().map(|r| format!("{:.4}", final_igd(r))).collect::<Vec<_>>().join(", ")
}

fn criterion_5(s: &Study) -> Outcome {
    let r = &s.full[0].0;
    ensure(r.archive.len() == 300, format!("archive holds {} entries", r.archive.len()))?;
    ensure(r.iterations == 66, format!("{} strategy triples", r.iterations))?;
    for tag in [StrategyTag::Prescreen, StrategyTag::HvSearch, StrategyTag::LocalSearch] {
        let n = r.trace.iter().filter(|t| t.tag == tag).count();
        ensure(n == 66, format!("{tag:?} evaluated {n} times"))?;
    }
    let a = serde_json::to_string(&r.trace).unwrap();
    let b = serde_json::to_string(&s.rerun.trace).unwrap();
    ensure(a == b, "traces of identical seeds differ")?;
    Ok(format!("300 entries, 66 triples, identical traces ({} bytes)", a.len()))
}

fn criterion_6(s: &Study) -> Outcome {
    let runs: Vec<&RunResult> = s.full.iter().map(|(r, _)| r).collect();
    let m = median(&runs);
    let slowest = s.full.iter().map(|(_, t)| *t).max().unwrap();
    ensure(slowest < Duration::from_secs(120), format!("slowest run {slowest:.1?}"))?;
    ensure(m <= 0.5, format!("median IGD {m:.4} > 0.5 [{}]", fmt_igd(&runs)))?;
    Ok(format!("median IGD {m:.4} [{}]; slowest run {slowest:.1?}", fmt_igd(&runs)))
}

fn criterion_7(s: &Study) -> Outcome {
    let runs: Vec<&RunResult> = s.zdt2.iter().collect();
    let m = median(&runs);
    ensure(m <= 0.2, format!("median IGD {m:.4} > 0.2 [{}]", fmt_igd(&runs)))?;
    Ok(format!("median IGD {m:.4} [{}]", fmt_igd(&runs)))
}

fn criterion_8(s: &Study) -> Outcome {
    let full = median(&s.full.iter().map(|(r, _)| r).collect::<Vec<_>>());
    let s1 = median(&s.s1.iter().collect::<Vec<_>>());
    let s3 = median(&s.s3.iter().collect::<Vec<_>>());
    let detail = format!("median IGD full {full:.4}, s1 {s1:.4}, s3 {s3:.4}");
    ensure(full < s1 && full < s3, detail.clone())?;
    Ok(detail)
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    for trial in 0..100u64 {
        let mut rng = derive_rng(trial, "c9", 0);
        let n = rng.random_range(5..=12);
        let a: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 10.0).round()).collect();
        let b: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 10.0).round()).collect();
        let w = wilcoxon_signed_rank(&a, &b, 0.05).map_err(|e| e.to_string())?;
        if w.insufficient {
            continue;
        }
        let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let p = common::enumerated_wilcoxon_p(&diffs);
        ensure((w.p_value - p).abs() < 1e-12, format!("trial {trial}: {} vs {p}", w.p_value))?;
        checked += 1;
    }
    let six = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[0.0; 6], 0.05).map_err(|e| e.to_string())?;
    ensure(six.p_value == 0.03125, format!("n = 6 all positive gives p = {}", six.p_value))?;
    Ok(format!("{checked} samples match enumeration; n = 6 gives p = 0.03125"))
}

fn mock(flags: &[&str], timeout_ms: u64) -> ExternalEvaluatorSpec {
    let mut command = vec![env!("CARGO_BIN_EXE_mock-evaluator").to_string(), "--dim".into(), "4".into()];
    command.extend(flags.iter().map(|s| s.to_string()));
    ExternalEvaluatorSpec { command, m: 2, d: 4, bounds: BoundsBox::uniform(4, 0.0, 1.0).unwrap(), timeout_ms, senses: vec![] }
}

fn criterion_10() -> Outcome {
    let mut p = ExternalEvaluator::spawn(mock(&[], 5_000)).map_err(|e| e.to_string())?;
    let config = RunConfig { n_init: Some(20), max_fes: 50, ..Default::default() };
    let r = run(&mut p, &config, &Observers::default()).map_err(|e| e.to_string())?;
    ensure(r.archive.len() == 50, format!("{} evaluations", r.archive.len()))?;
    let front: Vec<Vec<f64>> = r.nondominated().into_iter().map(|s| s.f).collect();
    ensure(front.iter().all(|f| (f[0] + f[1] - 1.0).abs() < 1e-12), "front leaves the line f2 = 1 - f1")?;
    let line = ReferenceFront::new((0..101).map(|i| vec![i as f64 / 100.0, 1.0 - i as f64 / 100.0]).collect()).unwrap();
    let distance = igd(&line, &front).map_err(|e| e.to_string())?;
    ensure(distance < 0.05, format!("IGD to the line {distance}"))?;

    let mut slow = ExternalEvaluator::spawn(mock(&["--sleep-ms", "3000"], 200)).map_err(|e| e.to_string())?;
    let timeout = slow.evaluate(&[0.5; 4], 1);
    ensure(matches!(timeout, Err(Error::EvalTimeout { fe_index: 1 })), format!("timeout path gave {timeout:?}"))?;
    let mut bad = ExternalEvaluator::spawn(mock(&["--garbage-from", "1"], 5_000)).map_err(|e| e.to_string())?;
    let garbage = bad.evaluate(&[0.5; 4], 1);
    ensure(matches!(garbage, Err(Error::Protocol { fe_index: 1, .. })), format!("malformed path gave {garbage:?}"))?;
    Ok(format!("50-FE run, {} front points, IGD to the line {distance:.4}; timeout and protocol errors", front.len()))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&*e))))
}

fn panic_message(e: &(dyn std::any::Any + Send)) -> String {
    e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
}

fn main() -> ExitCode {
    let names = [
        "hypervolume oracles",
        "non-dominated sorting oracle",
        "surrogate correctness",
        "argmax consistency",
        "budget and determinism",
        "DTLZ2 30-D performance",
        "ZDT2 30-D performance",
        "ablation direction",
        "Wilcoxon exact p-values",
        "external protocol",
    ];
    let mut outcomes = vec![guarded(criterion_1), guarded(criterion_2), guarded(criterion_3), guarded(criterion_4)];
    match panic::catch_unwind(study) {
        Ok(s) => {
            outcomes.push(guarded(|| criterion_5(&s)));
            outcomes.push(guarded(|| criterion_6(&s)));
            outcomes.push(guarded(|| criterion_7(&s)));
            outcomes.push(guarded(|| criterion_8(&s)));
        }
        Err(e) => outcomes.extend((0..4).map(|_| Err(format!("study runs failed: {}", panic_message(&*e))))),
    }
    outcomes.push(guarded(criterion_9));
    outcomes.push(guarded(criterion_10));

    let mut failed = 0;
    for (k, (name, outcome)) in names.iter().zip(&outcomes).enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
