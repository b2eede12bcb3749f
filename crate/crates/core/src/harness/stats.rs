use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest number of nonzero differences handled by the exact null
/// distribution; above it the normal approximation is used.
pub const EXACT_LIMIT: usize = 25;

/// Fewest nonzero differences for which a verdict is attempted.
pub const MIN_PAIRS: usize = 5;

/// Outcome of a paired comparison of `a` against `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    /// `a` is significantly larger.
    #[serde(rename = "+")]
    Plus,
    /// `a` is significantly smaller.
    #[serde(rename = "-")]
    Minus,
    /// No significant difference.
    #[serde(rename = "≈")]
    Tie,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Plus => "+",
            Verdict::Minus => "-",
            Verdict::Tie => "≈",
        }
    }

    /// The same outcome seen from the other side.
    pub fn flip(self) -> Self {
        match self {
            Verdict::Plus => Verdict::Minus,
            Verdict::Minus => Verdict::Plus,
            Verdict::Tie => Verdict::Tie,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonOutcome {
    pub verdict: Verdict,
    /// Two-sided p-value (1 when too few pairs differ).
    pub p_value: f64,
    /// Nonzero differences used.
    pub n: usize,
    /// Rank sum of the positive differences `a - b`.
    pub w_plus: f64,
    /// Rank sum of the negative differences.
    pub w_minus: f64,
    /// Whether the exact null distribution was used.
    pub exact: bool,
    /// Set when fewer than [`MIN_PAIRS`] differences are nonzero; the
    /// verdict is then always a tie.
    pub insufficient: bool,
}

/// Two-sided Wilcoxon signed-rank test on the paired differences `a - b`.
///
/// Zero differences are dropped and tied magnitudes get average ranks. Up
/// to [`EXACT_LIMIT`] pairs the p-value comes from the exact permutation
/// distribution of the signed ranks; beyond that from the normal
/// approximation with tie and continuity corrections. A significant result
/// takes its sign from the median difference.
///
/// ```
/// use clmea::harness::{wilcoxon_signed_rank, Verdict};
///
/// let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
/// let b = [0.5; 6];
/// let w = wilcoxon_signed_rank(&a, &b, 0.05)?;
/// assert_eq!(w.p_value, 0.03125);
/// assert_eq!(w.verdict, Verdict::Plus);
/// # Ok::<(), clmea::Error>(())
/// ```
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonOutcome> {
    if a.len() != b.len() {
        return Err(Error::contract(format!("paired samples of lengths {} and {}", a.len(), b.len())));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::contract("paired samples must be finite"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    let ranks = midranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let w_minus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d < 0.0).map(|(_, r)| r).sum();

    if n < MIN_PAIRS {
        return Ok(WilcoxonOutcome {
            verdict: Verdict::Tie,
            p_value: 1.0,
            n,
            w_plus,
            w_minus,
            exact: n <= EXACT_LIMIT,
            insufficient: true,
        });
    }
    let exact = n <= EXACT_LIMIT;
    let p_value = if exact { exact_p_value(&ranks, w_plus) } else { normal_p_value(&ranks, w_plus) };
    let verdict = if p_value < alpha {
        let m = median(&diffs);
        let up = if m != 0.0 { m > 0.0 } else { w_plus > w_minus };
        if up {
            Verdict::Plus
        } else {
            Verdict::Minus
        }
    } else {
        Verdict::Tie
    };
    Ok(WilcoxonOutcome { verdict, p_value, n, w_plus, w_minus, exact, insufficient: false })
}

/// Average ranks (1-based) of `values`.
fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// `min(1, 2 * min(P(W+ <= w), P(W+ >= w)))` under the null that every sign
/// is a fair coin. Midranks are halves at worst, so doubled ranks are
/// integers and the distribution is a subset-sum count.
fn exact_p_value(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let w = (2.0 * w_plus).round() as usize;
    let all = 2f64.powi(ranks.len() as i32);
    let lower: f64 = counts[..=w].iter().sum::<f64>() / all;
    let upper: f64 = counts[w..].iter().sum::<f64>() / all;
    (2.0 * lower.min(upper)).min(1.0)
}

fn normal_p_value(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Mean, median and sample standard deviation of one indicator over runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Describe {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample (n - 1) standard deviation; 0 for a single value.
    pub std: f64,
}

impl Describe {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { n, mean, median: median(values), std })
    }
}

/// Final indicator values of every completed run of one job, in run order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JobRuns {
    pub job: String,
    pub group: String,
    pub problem: String,
    /// Final IGD per completed run (empty when no reference front exists).
    pub igd: Vec<f64>,
    /// Final hypervolume per completed run.
    pub hv: Vec<f64>,
    /// Run indices of the completed runs, aligned with `igd` and `hv`.
    pub completed: Vec<usize>,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobStats {
    pub job: String,
    pub group: String,
    pub problem: String,
    pub completed: usize,
    pub failed: usize,
    pub igd: Option<Describe>,
    pub hv: Option<Describe>,
    /// Lowest mean IGD among the jobs on this problem.
    pub best_igd: bool,
    /// Highest mean hypervolume among the jobs on this problem.
    pub best_hv: bool,
}

/// Per-job statistics, with the best job of each problem flagged.
pub fn aggregate_stats(jobs: &[JobRuns]) -> Vec<JobStats> {
    let mut rows: Vec<JobStats> = jobs
        .iter()
        .map(|j| JobStats {
            job: j.job.clone(),
            group: j.group.clone(),
            problem: j.problem.clone(),
            completed: j.completed.len(),
            failed: j.failed,
            igd: Describe::of(&j.igd),
            hv: Describe::of(&j.hv),
            best_igd: false,
            best_hv: false,
        })
        .collect();
    for i in 0..rows.len() {
        let same: Vec<usize> = (0..rows.len()).filter(|&k| rows[k].problem == rows[i].problem).collect();
        let pick = |key: &dyn Fn(&JobStats) -> Option<f64>, lower: bool| {
            same.iter()
                .filter_map(|&k| key(&rows[k]).map(|v| (k, v)))
                .min_by(|a, b| {
                    let o = a.1.total_cmp(&b.1);
                    (if lower { o } else { o.reverse() }).then(a.0.cmp(&b.0))
                })
                .map(|(k, _)| k)
        };
        let best_igd = pick(&|r| r.igd.map(|d| d.mean), true) == Some(i);
        let best_hv = pick(&|r| r.hv.map(|d| d.mean), false) == Some(i);
        rows[i].best_igd = best_igd;
        rows[i].best_hv = best_hv;
    }
    rows
}

/// Which indicator a comparison is made on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Igd,
    Hv,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Igd => "igd",
            Metric::Hv => "hv",
        }
    }
}

/// One problem's paired test between two groups of runs. `verdict` reads
/// from `a`'s side: `+` means `a` is significantly better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemComparison {
    pub a: String,
    pub b: String,
    pub problem: String,
    pub metric: Metric,
    pub pairs: usize,
    pub outcome: WilcoxonOutcome,
    pub verdict: Verdict,
}

/// Tally of one group-against-group comparison over problems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub a: String,
    pub b: String,
    pub metric: Metric,
    pub better: usize,
    pub worse: usize,
    pub tie: usize,
}

/// Pairs the runs of `a` and `b` by run index and tests them. Runs present
/// on only one side are ignored.
pub fn compare_runs(a: &JobRuns, b: &JobRuns, metric: Metric, alpha: f64) -> Result<ProblemComparison> {
    let values = |j: &JobRuns| -> Vec<(usize, f64)> {
        let v = match metric {
            Metric::Igd => &j.igd,
            Metric::Hv => &j.hv,
        };
        j.completed.iter().copied().zip(v.iter().copied()).collect()
    };
    let (va, vb) = (values(a), values(b));
    let mut xa = Vec::new();
    let mut xb = Vec::new();
    for (run, v) in &va {
        if let Some((_, w)) = vb.iter().find(|(r, _)| r == run) {
            xa.push(*v);
            xb.push(*w);
        }
    }
    let outcome = wilcoxon_signed_rank(&xa, &xb, alpha)?;
    let verdict = match metric {
        Metric::Igd => outcome.verdict.flip(),
        Metric::Hv => outcome.verdict,
    };
    Ok(ProblemComparison {
        a: a.group.clone(),
        b: b.group.clone(),
        problem: a.problem.clone(),
        metric,
        pairs: xa.len(),
        outcome,
        verdict,
    })
}

/// Compares every problem that both groups ran, in the order of `a_jobs`.
pub fn compare_groups(
    a_jobs: &[&JobRuns],
    b_jobs: &[&JobRuns],
    metric: Metric,
    alpha: f64,
) -> Result<(Vec<ProblemComparison>, VerdictCounts)> {
    let mut rows = Vec::new();
    for a in a_jobs {
        if let Some(b) = b_jobs.iter().find(|b| b.problem == a.problem) {
            rows.push(compare_runs(a, b, metric, alpha)?);
        }
    }
    let count = |v: Verdict| rows.iter().filter(|r: &&ProblemComparison| r.verdict == v).count();
    let counts = VerdictCounts {
        a: a_jobs.first().map(|j| j.group.clone()).unwrap_or_default(),
        b: b_jobs.first().map(|j| j.group.clone()).unwrap_or_default(),
        metric,
        better: count(Verdict::Plus),
        worse: count(Verdict::Minus),
        tie: count(Verdict::Tie),
    };
    Ok((rows, counts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_tie() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let w = wilcoxon_signed_rank(&a, &a, 0.05).unwrap();
        assert_eq!(w.verdict, Verdict::Tie);
        assert!(w.insufficient);
        assert_eq!(w.n, 0);
    }

    #[test]
    fn all_positive_small_samples() {
        let b = [0.0; 6];
        let a = [0.3, 0.1, 0.6, 0.2, 0.5, 0.4];
        let w = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
        assert_eq!(w.w_minus, 0.0);
        assert_eq!(w.p_value, 0.03125);
        assert_eq!(w.verdict, Verdict::Plus);

        let w = wilcoxon_signed_rank(&a[..5], &b[..5], 0.05).unwrap();
        assert_eq!(w.p_value, 0.0625);
        assert_eq!(w.verdict, Verdict::Tie);
        assert!(!w.insufficient);

        let w = wilcoxon_signed_rank(&b, &a, 0.05).unwrap();
        assert_eq!(w.verdict, Verdict::Minus);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0], 0.05).is_err());
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn large_samples_use_the_normal_approximation() {
        let a: Vec<f64> = (1..=40).map(|i| i as f64).collect();
        let b = vec![0.0; 40];
        let w = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
        assert!(!w.exact);
        assert!(w.p_value < 1e-6);
        // Balanced signs: no evidence either way.
        let a: Vec<f64> = (1..=40).map(|i| if i % 2 == 0 { i as f64 } else { -(i as f64) }).collect();
        let w = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
        assert!(w.p_value > 0.5);
    }

    #[test]
    fn describe_examples() {
        let d = Describe::of(&[0.7]).unwrap();
        assert_eq!((d.mean, d.median, d.std), (0.7, 0.7, 0.0));
        let d = Describe::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((d.mean, d.median, d.std), (2.0, 2.0, 1.0));
        assert!(Describe::of(&[]).is_none());
    }

    #[test]
    fn best_flag_goes_to_lower_igd() {
        let job = |name: &str, igd: Vec<f64>| JobRuns {
            job: name.into(),
            group: name.into(),
            problem: "P".into(),
            completed: (0..igd.len()).collect(),
            hv: igd.iter().map(|v| 1.0 - v).collect(),
            igd,
            failed: 0,
        };
        let rows = aggregate_stats(&[job("a", vec![0.5, 0.6]), job("b", vec![0.1, 0.2])]);
        assert!(!rows[0].best_igd && rows[1].best_igd);
        assert!(!rows[0].best_hv && rows[1].best_hv);
    }

    #[test]
    fn group_comparison_orients_igd() {
        let job = |group: &str, problem: &str, igd: Vec<f64>| JobRuns {
            job: format!("{group}-{problem}"),
            group: group.into(),
            problem: problem.into(),
            completed: (0..igd.len()).collect(),
            hv: vec![],
            igd,
            failed: 0,
        };
        let low = job("a", "P", vec![0.1, 0.2, 0.15, 0.12, 0.11, 0.13]);
        let high = job("b", "P", vec![0.5, 0.6, 0.55, 0.52, 0.51, 0.53]);
        let same = job("a", "Q", vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let same_b = job("b", "Q", vec![0.2, 0.1, 0.4, 0.3, 0.6, 0.5]);
        let (rows, counts) = compare_groups(&[&low, &same], &[&high, &same_b], Metric::Igd, 0.05).unwrap();
        assert_eq!(rows[0].verdict, Verdict::Plus);
        assert_eq!(rows[1].verdict, Verdict::Tie);
        assert_eq!(counts.better + counts.worse + counts.tie, 2);
    }
}
