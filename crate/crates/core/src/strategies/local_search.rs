use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::{crowding_distance, environmental_selection, nondominated_sort, sbx_crossover, squared_euclidean, Archive, BoundsBox};

use super::{
    breed, decision_space_uncertainty, mutate, objective_distance, CandidatePool, InfillBatch, ObjectiveScaling,
    PoolEntry, Predictor, ScoreKind, StrategyParams, StrategyTag,
};

/// Positions (within `front`) of the `n` sparsest interior members: highest
/// finite crowding distance first, ties by position. Members with infinite
/// crowding (the per-objective extremes) are only used, in order, when too
/// few interior members exist.
pub fn select_sparse_points(front: &[Vec<f64>], n: usize) -> Vec<usize> {
    let crowding = crowding_distance(front);
    let mut interior: Vec<usize> = (0..front.len()).filter(|&i| crowding[i].is_finite()).collect();
    interior.sort_by(|&a, &b| crowding[b].total_cmp(&crowding[a]).then(a.cmp(&b)));
    let extremes = (0..front.len()).filter(|&i| crowding[i].is_infinite());
    interior.into_iter().chain(extremes).take(n).collect()
}

/// Local search in the sparse part of the archive's first front.
///
/// For each sparse front member: fit local RBFs on its nearest archive
/// points in scaled objective space, grow a population from that
/// neighbourhood (the first generation breeds with the sparse point itself),
/// then keep the evolved members that stay non-dominated against the current
/// front and pick the one farthest from every archived objective vector.
pub fn sparse_local_search<R: Rng + ?Sized>(
    archive: &Archive,
    params: &StrategyParams,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Result<InfillBatch> {
    if archive.len() < 2 {
        return Err(Error::contract("local search needs at least 2 archived samples"));
    }
    let objectives = archive.objectives();
    let scaling = ObjectiveScaling::of(archive)?;
    let scaled: Vec<Vec<f64>> = objectives.iter().map(|f| scaling.apply(f)).collect();
    let front = archive.first_front();
    let front_f: Vec<Vec<f64>> = front.iter().map(|&i| objectives[i].clone()).collect();
    let degenerate = front.len() < 2;
    let sparse: Vec<usize> = if degenerate {
        vec![front[0]; params.n_infill]
    } else {
        let mut picks: Vec<usize> = select_sparse_points(&front_f, params.n_infill).into_iter().map(|i| front[i]).collect();
        while picks.len() < params.n_infill {
            picks.push(picks[picks.len() % front.len()]);
        }
        picks
    };
    let train_size = archive.len().min(params.local_train_size_for(bounds.dim()));

    let mut batch = InfillBatch::new(StrategyTag::LocalSearch);
    for &s in &sparse {
        let mut order: Vec<usize> = (0..archive.len()).collect();
        let dist: Vec<f64> = scaled.iter().map(|f| squared_euclidean(f, &scaled[s])).collect();
        order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
        order.truncate(train_size);

        let xs: Vec<Vec<f64>> = order.iter().map(|&i| archive.get(i).x.clone()).collect();
        let ys: Vec<Vec<f64>> = order.iter().map(|&i| objectives[i].clone()).collect();
        let predictor = Predictor::fit(&xs, &ys, params, bounds)?;

        let size = params.np.min(order.len());
        let mut population: Vec<Vec<f64>> = xs[..size].to_vec();
        let mut predicted: Vec<Vec<f64>> = population.iter().map(|x| predictor.predict(x)).collect();
        let anchor = archive.get(s).x.clone();
        for generation in 0..params.max_gen2 {
            let children = if generation == 0 {
                reproduce_around(&anchor, &population, size, params, bounds, rng)
            } else {
                breed(&population, &predicted, size, &params.variation, bounds, rng)?
            };
            let child_f: Vec<Vec<f64>> = children.iter().map(|x| predictor.predict(x)).collect();
            population.extend(children);
            predicted.extend(child_f);
            let keep = environmental_selection(&predicted, size)?;
            population = keep.iter().map(|&i| population[i].clone()).collect();
            predicted = keep.iter().map(|&i| predicted[i].clone()).collect();
        }

        let eligible: Vec<bool> = if degenerate {
            vec![true; size]
        } else {
            let merged: Vec<Vec<f64>> = predicted.iter().chain(&front_f).cloned().collect();
            let first = nondominated_sort(&merged)?.swap_remove(0);
            let on_front: Vec<bool> = (0..size).map(|i| first.binary_search(&i).is_ok()).collect();
            if on_front.iter().any(|&b| b) {
                on_front
            } else {
                vec![true; size]
            }
        };
        let entries = population
            .into_iter()
            .zip(predicted)
            .zip(eligible)
            .map(|((x, f), eligible)| {
                let score = if degenerate {
                    decision_space_uncertainty(&x, archive, bounds)?
                } else {
                    objective_distance(&f, archive, &scaling)
                };
                Ok(PoolEntry { score, duplicate: archive.contains(&x), eligible, predicted: Some(f), x })
            })
            .collect::<Result<Vec<_>>>()?;
        let pool = CandidatePool {
            entries,
            reference_point: None,
            sparse_point: Some(s),
            training_set: Some(order),
            score_kind: if degenerate { ScoreKind::DecisionDistance } else { ScoreKind::ObjectiveDistance },
        };
        batch.take_best(pool, 1, archive, bounds, rng);
    }
    Ok(batch)
}

/// Children of the sparse point crossed with random neighbours.
fn reproduce_around<R: Rng + ?Sized>(
    anchor: &[f64],
    neighbours: &[Vec<f64>],
    count: usize,
    params: &StrategyParams,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let v = &params.variation;
    let mut children = Vec::with_capacity(count + 1);
    while children.len() < count {
        let mate = &neighbours[rng.random_range(0..neighbours.len())];
        let (c1, c2) = sbx_crossover(anchor, mate, v.eta_c, v.p_c, bounds, rng);
        children.push(mutate(&c1, v, bounds, rng));
        children.push(mutate(&c2, v, bounds, rng));
    }
    children.truncate(count);
    children
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::kernel::{latin_hypercube_sample, SeededRng};
    use crate::problems::ProblemSpec;

    #[test]
    fn sparse_point_is_never_an_extreme() {
        let front = vec![vec![0.0, 1.0], vec![0.5, 0.6], vec![0.4, 0.5], vec![1.0, 0.0]];
        let picked = select_sparse_points(&front, 1);
        assert_eq!(picked.len(), 1);
        assert!(picked[0] == 1 || picked[0] == 2);

        let front = vec![vec![0.0, 1.0], vec![0.1, 0.8], vec![0.6, 0.3], vec![1.0, 0.0]];
        // Interior crowding: 0.6 + 0.7 = 1.3 for the second, 0.9 + 0.8 = 1.7 for the third.
        assert_eq!(select_sparse_points(&front, 1), vec![2]);
        assert_eq!(select_sparse_points(&front, 3), vec![2, 1, 0]);
    }

    #[test]
    fn two_member_front_falls_back_to_extremes() {
        assert_eq!(select_sparse_points(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1), vec![0]);
    }

    #[test]
    fn training_set_size_is_capped_by_archive() {
        let p = ProblemSpec::zdt(1, 4).unwrap();
        let mut rng = SeededRng::seed_from_u64(8);
        let mut a = Archive::new();
        for x in latin_hypercube_sample(12, p.bounds(), &mut rng) {
            let f = p.evaluate(&x).unwrap();
            a.push(x, f).unwrap();
        }
        let params = StrategyParams { np: 8, max_gen2: 3, ..Default::default() };
        let batch = sparse_local_search(&a, &params, p.bounds(), &mut rng).unwrap();
        assert_eq!(batch.pools[0].training_set.as_ref().unwrap().len(), 12);
        let params = StrategyParams { np: 8, max_gen2: 3, local_train_size: Some(5), ..Default::default() };
        let batch = sparse_local_search(&a, &params, p.bounds(), &mut rng).unwrap();
        assert_eq!(batch.pools[0].training_set.as_ref().unwrap().len(), 5);
        assert!(p.bounds().contains(&batch.candidates[0]));
    }
}
