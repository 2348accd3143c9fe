use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operators::{crossover_beam_vectors, mutate_beam_vector, tournament_select};
use super::{argmax, mean, Budget, GenerationStats, SwarmEnv};
use crate::channel::{GridCell, LinkGeometry};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerParams {
    pub population_size: usize,
    pub max_generations: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub tournament_size: usize,
    pub time_budget_s: Option<f64>,
}

/// Outcome of a beam-direction search for one fixed layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSearch {
    pub beams: Vec<f64>,
    pub best_of: f64,
    pub history: Vec<GenerationStats>,
    pub evaluations: u64,
}

/// Beam GA for the layout `cells`. Seed vectors (if any) replace the first
/// random individuals of the initial population.
pub fn inner_ga(
    cells: &[GridCell],
    env: &SwarmEnv,
    params: &InnerParams,
    seeds: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<BeamSearch> {
    let geometry = env.geometry(cells, rng)?;
    Ok(beam_search(&geometry, env, params, seeds, rng))
}

/// Beam GA on a precomputed geometry.
pub fn beam_search(
    geometry: &LinkGeometry,
    env: &SwarmEnv,
    params: &InnerParams,
    seeds: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> BeamSearch {
    let n = geometry.len();
    let pop_size = params.population_size.max(1);
    let mut budget = Budget::new(params.time_budget_s);

    let mut pop: Vec<Vec<f64>> = seeds.iter().take(pop_size).cloned().collect();
    while pop.len() < pop_size {
        pop.push((0..n).map(|_| rng.random_range(0.0..360.0)).collect());
    }

    if env.beams_irrelevant() {
        // every beam vector scores the same
        let of = env.evaluate(geometry, &pop[0]);
        let history = (0..=params.max_generations)
            .map(|g| GenerationStats {
                generation: g,
                best_of: of,
                avg_of: of,
                evaluations: 1,
                elapsed_s: 0.0,
            })
            .collect();
        return BeamSearch {
            beams: pop.swap_remove(0),
            best_of: of,
            history,
            evaluations: 1,
        };
    }

    let mut fitness: Vec<f64> = pop.iter().map(|b| env.evaluate(geometry, b)).collect();
    let mut evaluations = pop_size as u64;
    let mut history = Vec::with_capacity(params.max_generations + 1);
    let stats = |g: usize, fit: &[f64], evals: u64, budget: &Budget| GenerationStats {
        generation: g,
        best_of: fit[argmax(fit)],
        avg_of: mean(fit),
        evaluations: evals,
        elapsed_s: budget.elapsed_s(),
    };
    history.push(stats(0, &fitness, evaluations, &budget));
    budget.mark_generation();

    for generation in 1..=params.max_generations {
        if !budget.allows(generation) {
            break;
        }
        let elite = argmax(&fitness);
        let mut next = Vec::with_capacity(pop_size);
        let mut next_fit = Vec::with_capacity(pop_size);
        next.push(pop[elite].clone());
        next_fit.push(fitness[elite]);
        while next.len() < pop_size {
            let a = tournament_select(&fitness, params.tournament_size, rng);
            let b = tournament_select(&fitness, params.tournament_size, rng);
            let (mut c1, mut c2) = if rng.random::<f64>() < params.crossover_rate {
                crossover_beam_vectors(&pop[a], &pop[b], rng)
            } else {
                (pop[a].clone(), pop[b].clone())
            };
            mutate_beam_vector(&mut c1, params.mutation_rate, rng);
            mutate_beam_vector(&mut c2, params.mutation_rate, rng);
            for child in [c1, c2] {
                if next.len() < pop_size {
                    next_fit.push(env.evaluate(geometry, &child));
                    next.push(child);
                    evaluations += 1;
                }
            }
        }
        pop = next;
        fitness = next_fit;
        history.push(stats(generation, &fitness, evaluations, &budget));
        budget.mark_generation();
    }

    let best = argmax(&fitness);
    BeamSearch {
        beams: pop.swap_remove(best),
        best_of: fitness[best],
        history,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelParams, GridSpec, Jammer, Position, RadiationPattern};
    use crate::optimizer::{substream, GaConfig};
    use crate::routing::ObjectiveWeights;

    fn env(pattern: RadiationPattern) -> SwarmEnv {
        SwarmEnv {
            n_uav: 2,
            grid: GridSpec::default(),
            jammer: Jammer::omni(Position::new(200.0, 300.0), f64::NEG_INFINITY),
            pattern,
            channel: ChannelParams::default(),
            weights: ObjectiveWeights::default(),
        }
    }

    const CELLS: [GridCell; 2] = [GridCell::new(1, 2), GridCell::new(5, 2)];

    #[test]
    fn zero_generations_keeps_initial_best() {
        let e = env(RadiationPattern::default());
        let params = InnerParams {
            max_generations: 0,
            ..GaConfig::default().inner()
        };
        let mut rng = substream(11, 0, 0);
        let r = inner_ga(&CELLS, &e, &params, &[], &mut rng).unwrap();
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.best_of, r.history[0].best_of);
        assert_eq!(r.evaluations, params.population_size as u64);
    }

    #[test]
    fn elitism_and_seed_lower_bound() {
        let e = SwarmEnv {
            jammer: Jammer::omni(Position::new(0.0, 0.0), 100.0),
            ..env(RadiationPattern::default())
        };
        let seed = vec![0.0, 0.0];
        let mut rng = substream(12, 0, 0);
        let geom = e.geometry(&CELLS, &mut rng).unwrap();
        let floor = e.evaluate(&geom, &seed);
        let r = beam_search(&geom, &e, &GaConfig::default().inner(), &[seed], &mut rng);
        assert!(r.best_of >= floor);
        for w in r.history.windows(2) {
            assert!(w[1].best_of >= w[0].best_of);
        }
    }

    #[test]
    fn beams_face_each_other() {
        let e = env(RadiationPattern::default());
        let params = InnerParams {
            population_size: 30,
            max_generations: 40,
            ..GaConfig::default().inner()
        };
        let r = inner_ga(&CELLS, &e, &params, &[], &mut substream(13, 0, 0)).unwrap();
        // UAV 0 is west of UAV 1: ideal beams 0 and 180 degrees
        let off = |b: f64, target: f64| {
            let d = (b - target).rem_euclid(360.0);
            d.min(360.0 - d)
        };
        assert!(off(r.beams[0], 0.0) < 45.0, "{:?}", r.beams);
        assert!(off(r.beams[1], 180.0) < 45.0, "{:?}", r.beams);
    }

    #[test]
    fn omnidirectional_short_circuit() {
        let e = env(RadiationPattern::omnidirectional(0.0));
        let mut rng = substream(14, 0, 0);
        let r = inner_ga(&CELLS, &e, &GaConfig::default().inner(), &[], &mut rng).unwrap();
        let geom = e.geometry(&CELLS, &mut rng).unwrap();
        assert_eq!(r.best_of, e.evaluate(&geom, &[123.0, 45.0]));
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.history.len(), GaConfig::default().inner_max_generations + 1);
    }
}
