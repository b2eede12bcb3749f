use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::{
    binomial_crossover, environmental_selection, nondominated_sort, rank_based_mutation, Archive, BoundsBox,
};
use crate::surrogates::pnn_fit;

use super::{decision_space_uncertainty, mutate, CandidatePool, InfillBatch, PoolEntry, ScoreKind, StrategyParams, StrategyTag};

/// Classifier-assisted rank-based learning.
///
/// The best `np` archive members are labelled by their non-domination level
/// and a PNN learns those labels. Offspring are bred with
/// `x_r1 + mu * (x_r2 - x_r3)` (donors from the first, and first or second,
/// predicted level), binomial crossover and polynomial mutation, then
/// classified; breeding repeats from the new offspring until the predicted
/// first-level share reaches the threshold or the loop cap is hit. The
/// offspring predicted in the first level (all of them if none is) are
/// scored by their normalized distance to the archive and the farthest win.
pub fn classifier_rank_prescreen<R: Rng + ?Sized>(
    archive: &Archive,
    params: &StrategyParams,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Result<InfillBatch> {
    if archive.len() < 4 {
        return Err(Error::contract(format!(
            "rank-based pre-screening needs at least 4 archived samples, got {}",
            archive.len()
        )));
    }
    let objectives = archive.objectives();
    let selected = environmental_selection(&objectives, params.np)?;
    let population: Vec<Vec<f64>> = selected.iter().map(|&i| archive.get(i).x.clone()).collect();
    let population_f: Vec<Vec<f64>> = selected.iter().map(|&i| objectives[i].clone()).collect();

    let mut labels = vec![0u32; population.len()];
    for (level, front) in nondominated_sort(&population_f)?.iter().enumerate() {
        for &i in front {
            labels[i] = level as u32 + 1;
        }
    }
    let normalized: Vec<Vec<f64>> = population.iter().map(|x| bounds.normalize(x)).collect();
    let classifier = pnn_fit(&normalized, &labels, params.surrogate.sigma)?;

    let size = population.len();
    let mut donors = population;
    let mut donor_labels = labels;
    let mut batch = InfillBatch::new(StrategyTag::Prescreen);
    let mut offspring;
    let mut predicted;
    loop {
        batch.loops += 1;
        offspring = breed_ranked(&donors, &donor_labels, size, params, bounds, rng);
        predicted = offspring
            .iter()
            .map(|x| classifier.predict_unchecked(&bounds.normalize(x)))
            .collect::<Vec<u32>>();
        let first = predicted.iter().filter(|&&l| l == 1).count();
        if first as f64 / size as f64 >= params.first_rank_threshold {
            batch.threshold_met = true;
            break;
        }
        if batch.loops >= params.prescreen_max_loops {
            break;
        }
        if first > 0 {
            donors = offspring.clone();
            donor_labels = predicted.clone();
        }
    }

    let any_first = predicted.contains(&1);
    let entries = offspring
        .into_iter()
        .zip(&predicted)
        .map(|(x, &label)| {
            Ok(PoolEntry {
                score: decision_space_uncertainty(&x, archive, bounds)?,
                duplicate: archive.contains(&x),
                eligible: !any_first || label == 1,
                predicted: None,
                x,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pool = CandidatePool {
        entries,
        reference_point: None,
        sparse_point: None,
        training_set: None,
        score_kind: ScoreKind::DecisionDistance,
    };
    batch.take_best(pool, params.n_infill, archive, bounds, rng);
    Ok(batch)
}

/// One pool of `count` offspring from labelled donors.
fn breed_ranked<R: Rng + ?Sized>(
    donors: &[Vec<f64>],
    labels: &[u32],
    count: usize,
    params: &StrategyParams,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let best = *labels.iter().min().expect("non-empty donors");
    let next = labels.iter().copied().filter(|&l| l > best).min();
    let first: Vec<usize> = (0..donors.len()).filter(|&i| labels[i] == best).collect();
    let second: Vec<usize> = (0..donors.len()).filter(|&i| Some(labels[i]) == next).collect();
    let top_two: Vec<usize> = first.iter().chain(&second).copied().collect();

    (0..count)
        .map(|i| {
            let (r1, r2, r3) = pick_donors(&first, &top_two, rng);
            let mut v = rank_based_mutation(&donors[r1], &donors[r2], &donors[r3], params.mu);
            bounds.clip(&mut v);
            let target = &donors[i % donors.len()];
            let u = binomial_crossover(target, &v, params.variation.de_crossover_rate, rng);
            mutate(&u, &params.variation, bounds, rng)
        })
        .collect()
}

/// `r1, r2` from the first level and `r3` from the first two, all distinct
/// when the levels are large enough, with replacement otherwise.
fn pick_donors<R: Rng + ?Sized>(first: &[usize], top_two: &[usize], rng: &mut R) -> (usize, usize, usize) {
    let (r1, r2) = if first.len() >= 2 {
        let s = sample(rng, first.len(), 2);
        (first[s.index(0)], first[s.index(1)])
    } else {
        (first[rng.random_range(0..first.len())], first[rng.random_range(0..first.len())])
    };
    let rest: Vec<usize> = top_two.iter().copied().filter(|&i| i != r1 && i != r2).collect();
    let r3 = if rest.is_empty() {
        top_two[rng.random_range(0..top_two.len())]
    } else {
        rest[rng.random_range(0..rest.len())]
    };
    (r1, r2, r3)
}
