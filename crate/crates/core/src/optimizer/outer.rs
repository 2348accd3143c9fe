use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use super::inner::inner_ga;
use super::operators::{crossover_positions, mutate_position, repair, tournament_select};
use super::{argmax, mean, substream, Budget, Chromosome, GaConfig, GaReport, Gene, GenerationStats, SwarmEnv};
use crate::error::{Error, Result};

const INIT_STREAM: u64 = u64::MAX - 1;
const OPERATOR_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone)]
struct Individual {
    chromosome: Chromosome,
    fitness: f64,
}

/// A layout waiting for its inner beam search.
struct Pending {
    chromosome: Chromosome,
    /// Pass the chromosome's own beams to the inner GA as a seed.
    warm: bool,
}

/// Position GA without warm-start seeds.
pub fn outer_ga(env: &SwarmEnv, config: &GaConfig) -> Result<GaReport> {
    outer_ga_seeded(env, config, &[])
}

/// Position GA whose initial population starts with `seeds` (repaired to be
/// valid on `env.grid`). Seeded chromosomes keep their beams as a starting
/// point for their inner search, so a seed's score is a lower bound on the
/// reported optimum.
pub fn outer_ga_seeded(env: &SwarmEnv, config: &GaConfig, seeds: &[Chromosome]) -> Result<GaReport> {
    config.validate()?;
    env.weights.validate()?;
    let free = env.free_cells();
    if env.n_uav == 0 {
        return Err(Error::config("n_uav", "must be >= 1"));
    }
    if free.len() < env.n_uav {
        return Err(Error::config(
            "grid",
            format!("{} free grid points cannot hold {} UAVs", free.len(), env.n_uav),
        ));
    }
    let blocked = env.blocked();
    let inner = config.inner();
    let seed = config.rng_seed;
    let mut budget = Budget::new(config.time_budget_s);

    let mut init_rng = substream(seed, 0, INIT_STREAM);
    let mut pending = Vec::with_capacity(config.population_size);
    for s in seeds.iter().take(config.population_size) {
        if s.len() != env.n_uav {
            return Err(Error::config(
                "seed",
                format!("seed chromosome has {} genes, expected {}", s.len(), env.n_uav),
            ));
        }
        let mut c = s.clone();
        let parent = s.clone();
        repair(&mut c, &parent, &env.grid, &blocked, &mut init_rng);
        pending.push(Pending {
            chromosome: c,
            warm: true,
        });
    }
    while pending.len() < config.population_size {
        let genes = sample(&mut init_rng, free.len(), env.n_uav)
            .into_iter()
            .map(|k| Gene::new(free[k], init_rng.random_range(0.0..360.0)))
            .collect();
        pending.push(Pending {
            chromosome: Chromosome::new(genes),
            warm: false,
        });
    }

    let evaluate = |generation: usize, offset: usize, batch: Vec<Pending>| -> Result<(Vec<Individual>, u64)> {
        let run = |(k, p): (usize, Pending)| -> Result<(Individual, u64)> {
            let mut rng = substream(seed, generation as u64, (offset + k) as u64);
            let seeds = if p.warm { vec![p.chromosome.beams()] } else { Vec::new() };
            let found = inner_ga(&p.chromosome.cells(), env, &inner, &seeds, &mut rng)?;
            Ok((
                Individual {
                    chromosome: p.chromosome.with_beams(&found.beams),
                    fitness: found.best_of,
                },
                found.evaluations,
            ))
        };
        let results: Vec<Result<(Individual, u64)>> = if config.parallel {
            batch.into_par_iter().enumerate().map(run).collect()
        } else {
            batch.into_iter().enumerate().map(run).collect()
        };
        let mut out = Vec::with_capacity(results.len());
        let mut evals = 0;
        for r in results {
            let (ind, e) = r?;
            evals += e;
            out.push(ind);
        }
        Ok((out, evals))
    };

    let (mut population, mut evaluations) = evaluate(0, 0, pending)?;
    let stats = |g: usize, pop: &[Individual], evals: u64, budget: &Budget| {
        let fit: Vec<f64> = pop.iter().map(|i| i.fitness).collect();
        GenerationStats {
            generation: g,
            best_of: fit[argmax(&fit)],
            avg_of: mean(&fit),
            evaluations: evals,
            elapsed_s: budget.elapsed_s(),
        }
    };
    let mut history = vec![stats(0, &population, evaluations, &budget)];
    budget.mark_generation();
    let mut generations_run = 0;

    for generation in 1..=config.max_generations {
        if !budget.allows(generation) {
            log::debug!("time budget reached after {generations_run} generations");
            break;
        }
        let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
        let elite = population[argmax(&fitness)].clone();
        let mut rng = substream(seed, generation as u64, OPERATOR_STREAM);
        let mut children = Vec::with_capacity(config.population_size - 1);
        while children.len() + 1 < config.population_size {
            let a = &population[tournament_select(&fitness, config.tournament_size, &mut rng)].chromosome;
            let b = &population[tournament_select(&fitness, config.tournament_size, &mut rng)].chromosome;
            let (c1, c2) = if rng.random::<f64>() < config.crossover_rate {
                crossover_positions(a, b, &env.grid, &blocked, &mut rng)
            } else {
                (a.clone(), b.clone())
            };
            for child in [c1, c2] {
                if children.len() + 1 < config.population_size {
                    let chromosome = mutate_position(&child, &env.grid, &blocked, config.mutation_rate, &mut rng);
                    children.push(Pending {
                        chromosome,
                        warm: false,
                    });
                }
            }
        }
        let (evaluated, evals) = evaluate(generation, 1, children)?;
        evaluations += evals;
        population = std::iter::once(elite).chain(evaluated).collect();
        generations_run = generation;
        history.push(stats(generation, &population, evaluations, &budget));
        budget.mark_generation();
    }

    let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
    let best = population.swap_remove(argmax(&fitness));
    Ok(GaReport {
        best: best.chromosome,
        best_of: best.fitness,
        history,
        generations_run,
        evaluations,
        elapsed_s: budget.elapsed_s(),
    })
}
