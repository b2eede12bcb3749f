use crate::error::{Error, Result};

use super::RankedPopulation;

/// Pareto dominance under minimization: `a` is no worse everywhere and
/// strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::contract(format!(
            "cannot compare objective vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(dominates_unchecked(a, b))
}

#[inline]
pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// `a` dominates or equals `b`.
#[inline]
pub(crate) fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Partitions `objectives` into non-domination fronts.
///
/// Front 0 holds the indices no other point dominates, front 1 those only
/// dominated from front 0, and so on. Indices keep their input order within a
/// front.
pub fn nondominated_sort(objectives: &[Vec<f64>]) -> Result<Vec<Vec<usize>>> {
    let n = objectives.len();
    if n == 0 {
        return Err(Error::contract("cannot sort an empty population"));
    }
    let m = objectives[0].len();
    if objectives.iter().any(|f| f.len() != m) {
        return Err(Error::contract("objective vectors have differing lengths"));
    }

    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates_unchecked(&objectives[i], &objectives[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_unchecked(&objectives[j], &objectives[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    Ok(fronts)
}

/// Crowding distance of each member of one front.
///
/// Gaps are normalized by the front's per-objective range; an objective with
/// zero range contributes nothing. The first and last member along every
/// objective get `+inf`.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]));
        let lo = front[order[0]][k];
        let hi = front[order[n - 1]][k];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let i = order[w];
            if distance[i].is_finite() {
                distance[i] += (front[order[w + 1]][k] - front[order[w - 1]][k]) / range;
            }
        }
    }
    distance
}

/// Picks `min(np, len)` survivors: ascending front, then descending crowding,
/// then input order.
pub fn environmental_selection(objectives: &[Vec<f64>], np: usize) -> Result<Vec<usize>> {
    if objectives.is_empty() {
        return Ok(Vec::new());
    }
    let ranked = RankedPopulation::rank(objectives)?;
    let mut order = ranked.preference_order();
    order.truncate(np.min(objectives.len()));
    Ok(order)
}
