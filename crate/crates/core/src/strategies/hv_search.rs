use rand::Rng;

use crate::error::{Error, Result};
use crate::indicators::hv_improvement;
use crate::kernel::{environmental_selection, Archive, BoundsBox};

use super::{breed, CandidatePool, InfillBatch, PoolEntry, Predictor, ScoreKind, StrategyParams, StrategyTag};

/// Hypervolume-driven search on global surrogates.
///
/// Seeds a population with the best `np` archive members, evolves it for
/// `max_gen1` generations against one RBF per objective (fitted on the whole
/// archive), then ranks the final population by the hypervolume its
/// predicted objectives would add to the archive's first front.
pub fn hv_nondominated_search<R: Rng + ?Sized>(
    archive: &Archive,
    params: &StrategyParams,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Result<InfillBatch> {
    if archive.len() < 2 {
        return Err(Error::contract("hypervolume search needs at least 2 archived samples"));
    }
    let objectives = archive.objectives();
    let predictor = Predictor::fit(&archive.decisions(), &objectives, params, bounds)?;

    let seeds = environmental_selection(&objectives, params.np)?;
    let mut population: Vec<Vec<f64>> = seeds.iter().map(|&i| archive.get(i).x.clone()).collect();
    let mut predicted: Vec<Vec<f64>> = population.iter().map(|x| predictor.predict(x)).collect();
    let size = population.len();

    for _ in 0..params.max_gen1 {
        let children = breed(&population, &predicted, size, &params.variation, bounds, rng)?;
        let child_f: Vec<Vec<f64>> = children.iter().map(|x| predictor.predict(x)).collect();
        population.extend(children);
        predicted.extend(child_f);
        let keep = environmental_selection(&predicted, size)?;
        population = keep.iter().map(|&i| population[i].clone()).collect();
        predicted = keep.iter().map(|&i| predicted[i].clone()).collect();
    }

    let front: Vec<Vec<f64>> = archive.first_front().into_iter().map(|i| objectives[i].clone()).collect();
    let reference = params
        .reference_point
        .place(front.iter().chain(&predicted).map(Vec::as_slice));
    let entries = population
        .into_iter()
        .zip(predicted)
        .map(|(x, f)| {
            Ok(PoolEntry {
                score: hv_improvement(&front, &f, &reference)?,
                duplicate: archive.contains(&x),
                eligible: true,
                predicted: Some(f),
                x,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pool = CandidatePool {
        entries,
        reference_point: Some(reference),
        sparse_point: None,
        training_set: None,
        score_kind: ScoreKind::HvImprovement,
    };
    let mut batch = InfillBatch::new(StrategyTag::HvSearch);
    batch.take_best(pool, params.n_infill, archive, bounds, rng);
    Ok(batch)
}
