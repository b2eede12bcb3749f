use rand::seq::index::sample;
use rand::Rng;

use crate::error::Result;
use crate::kernel::{binomial_crossover, latin_hypercube_sample, Archive, BoundsBox};
use crate::strategies::{mutate, Predictor, StrategyParams};

use super::{BootstrapMode, RunConfig};

/// Candidate for the minimizer of objective `objective`, not yet evaluated.
pub(crate) fn extreme_candidate<R: Rng + ?Sized>(
    archive: &Archive,
    objective: usize,
    config: &RunConfig,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match config.bootstrap {
        BootstrapMode::SurrogateDe => surrogate_de(archive, objective, config, bounds, rng),
        BootstrapMode::ArchiveScan => Ok(archive_scan(archive, objective, &config.strategy, bounds, rng)),
    }
}

/// DE/rand/1/bin on the RBF of one objective. Returns the best population
/// member that is not already archived.
fn surrogate_de<R: Rng + ?Sized>(
    archive: &Archive,
    objective: usize,
    config: &RunConfig,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let de = &config.bootstrap_de;
    let predictor = Predictor::fit(&archive.decisions(), &archive.objectives(), &config.strategy, bounds)?;
    let value = |x: &[f64]| predictor.predict(x)[objective];

    let mut population = latin_hypercube_sample(de.population, bounds, rng);
    let mut fitness: Vec<f64> = population.iter().map(|x| value(x)).collect();
    let scale = de.scale.unwrap_or(config.strategy.mu);
    let np = population.len();
    if np >= 4 {
        for _ in 0..de.generations {
            for i in 0..np {
                let (r1, r2, r3) = distinct_three(np, i, rng);
                let mut donor: Vec<f64> = population[r1]
                    .iter()
                    .zip(&population[r2])
                    .zip(&population[r3])
                    .map(|((a, b), c)| a + scale * (b - c))
                    .collect();
                bounds.clip(&mut donor);
                let trial = binomial_crossover(&population[i], &donor, de.crossover_rate, rng);
                let f = value(&trial);
                if f <= fitness[i] {
                    population[i] = trial;
                    fitness[i] = f;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..np).collect();
    order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .map(|i| population[i].clone())
        .find(|x| !archive.contains(x))
        .unwrap_or_else(|| fresh(archive, bounds, rng)))
}

/// Three distinct indices, all different from `skip`.
fn distinct_three<R: Rng + ?Sized>(n: usize, skip: usize, rng: &mut R) -> (usize, usize, usize) {
    let s = sample(rng, n - 1, 3);
    let lift = |k: usize| if k >= skip { k + 1 } else { k };
    (lift(s.index(0)), lift(s.index(1)), lift(s.index(2)))
}

/// The archived minimizer of one objective, moved off the archive by
/// polynomial mutation.
fn archive_scan<R: Rng + ?Sized>(
    archive: &Archive,
    objective: usize,
    params: &StrategyParams,
    bounds: &BoundsBox,
    rng: &mut R,
) -> Vec<f64> {
    let best = (0..archive.len())
        .min_by(|&a, &b| archive.get(a).f[objective].total_cmp(&archive.get(b).f[objective]).then(a.cmp(&b)))
        .expect("non-empty archive");
    let x = &archive.get(best).x;
    for _ in 0..100 {
        let y = mutate(x, &params.variation, bounds, rng);
        if !archive.contains(&y) {
            return y;
        }
    }
    fresh(archive, bounds, rng)
}

fn fresh<R: Rng + ?Sized>(archive: &Archive, bounds: &BoundsBox, rng: &mut R) -> Vec<f64> {
    loop {
        let x = latin_hypercube_sample(1, bounds, rng).pop().expect("one point");
        if !archive.contains(&x) {
            return x;
        }
    }
}
