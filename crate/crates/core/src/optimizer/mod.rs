//! Two-level genetic search over swarm layouts.
//!
//! The outer GA moves UAVs between grid points; every outer fitness call runs
//! an inner GA over beam directions for that fixed layout and takes the best
//! objective found. Both levels use tournament selection, one-point
//! crossover, per-gene mutation and single-individual elitism.
//!
//! Every random draw comes from a ChaCha stream derived from
//! `(rng_seed, generation, individual)`, so sequential and parallel runs
//! produce identical reports.

mod inner;
mod operators;
mod outer;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    normalize_deg, ChannelParams, GridCell, GridSpec, Jammer, LinkGeometry, Position, RadiationPattern, UavState,
};
use crate::error::{Error, Result};
use crate::routing::{e2e_aggregates, objective_from_aggregates, ObjectiveWeights};

pub use inner::{beam_search, inner_ga, BeamSearch, InnerParams};
pub use operators::{
    crossover_beam_vectors, crossover_beams, crossover_positions, crossover_positions_at, mutate_beam,
    mutate_beam_vector, mutate_position, one_point_crossover, repair, tournament_select, BEAM_DEVIATION_DEG,
};
pub use outer::{outer_ga, outer_ga_seeded};

/// One UAV's share of a chromosome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gene {
    pub cell: GridCell,
    pub beam_deg: f64,
}

impl Gene {
    pub fn new(cell: GridCell, beam_deg: f64) -> Self {
        Self {
            cell,
            beam_deg: normalize_deg(beam_deg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub genes: Vec<Gene>,
}

impl Chromosome {
    pub fn new(genes: Vec<Gene>) -> Self {
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn cells(&self) -> Vec<GridCell> {
        self.genes.iter().map(|g| g.cell).collect()
    }

    pub fn beams(&self) -> Vec<f64> {
        self.genes.iter().map(|g| g.beam_deg).collect()
    }

    pub fn with_beams(&self, beams: &[f64]) -> Chromosome {
        Chromosome {
            genes: self
                .genes
                .iter()
                .zip(beams)
                .map(|(g, &b)| Gene::new(g.cell, b))
                .collect(),
        }
    }

    /// In bounds, pairwise distinct, clear of `blocked`, beams in `[0, 360)`.
    pub fn is_valid(&self, grid: &GridSpec, blocked: &[GridCell]) -> bool {
        let mut cells = self.cells();
        let in_bounds = cells.iter().all(|&c| grid.contains(c) && !blocked.contains(&c));
        let beams_ok = self.genes.iter().all(|g| (0.0..360.0).contains(&g.beam_deg));
        cells.sort_unstable();
        cells.dedup();
        in_bounds && beams_ok && cells.len() == self.genes.len()
    }
}

fn default_population() -> usize {
    100
}
fn default_generations() -> usize {
    50
}
fn default_mutation() -> f64 {
    0.15
}
fn default_crossover() -> f64 {
    0.9
}
fn default_tournament() -> usize {
    3
}
fn default_inner_population() -> usize {
    20
}
fn default_inner_generations() -> usize {
    15
}
fn default_true() -> bool {
    true
}

/// GA parameters. Defaults: population 100, 50 generations, 15 % mutation,
/// 90 % crossover, tournaments of 3, inner GA 20 x 15.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_generations")]
    pub max_generations: usize,
    #[serde(default = "default_mutation")]
    pub mutation_rate: f64,
    #[serde(default = "default_crossover")]
    pub crossover_rate: f64,
    #[serde(default = "default_tournament")]
    pub tournament_size: usize,
    #[serde(default = "default_inner_population")]
    pub inner_population_size: usize,
    #[serde(default = "default_inner_generations")]
    pub inner_max_generations: usize,
    /// Wall-clock limit in seconds, checked between generations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_s: Option<f64>,
    #[serde(default)]
    pub rng_seed: u64,
    /// Evaluate individuals on the rayon pool.
    #[serde(default = "default_true")]
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: default_population(),
            max_generations: default_generations(),
            mutation_rate: default_mutation(),
            crossover_rate: default_crossover(),
            tournament_size: default_tournament(),
            inner_population_size: default_inner_population(),
            inner_max_generations: default_inner_generations(),
            time_budget_s: None,
            rng_seed: 0,
            parallel: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("ga.population_size", "must be >= 2"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config("ga.mutation_rate", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::config("ga.crossover_rate", "must lie in [0, 1]"));
        }
        if self.tournament_size < 2 {
            return Err(Error::config("ga.tournament_size", "must be >= 2"));
        }
        if self.inner_population_size < 1 {
            return Err(Error::config("ga.inner_population_size", "must be >= 1"));
        }
        if let Some(t) = self.time_budget_s {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config("ga.time_budget_s", "must be > 0"));
            }
        }
        Ok(())
    }

    /// Parameters for the per-layout beam search run inside outer fitness calls.
    pub fn inner(&self) -> InnerParams {
        InnerParams {
            population_size: self.inner_population_size,
            max_generations: self.inner_max_generations,
            mutation_rate: self.mutation_rate,
            crossover_rate: self.crossover_rate,
            tournament_size: self.tournament_size,
            time_budget_s: None,
        }
    }

    /// Parameters for a stand-alone beam search that uses the main
    /// population and generation counts (fixed-position scenario).
    pub fn as_beam_search(&self) -> InnerParams {
        InnerParams {
            population_size: self.population_size,
            max_generations: self.max_generations,
            mutation_rate: self.mutation_rate,
            crossover_rate: self.crossover_rate,
            tournament_size: self.tournament_size,
            time_budget_s: self.time_budget_s,
        }
    }
}

/// Read-only description of what is being optimised.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmEnv {
    pub n_uav: usize,
    pub grid: GridSpec,
    pub jammer: Jammer,
    pub pattern: RadiationPattern,
    pub channel: ChannelParams,
    pub weights: ObjectiveWeights,
}

impl SwarmEnv {
    /// Grid points no UAV may occupy (the jammer's own position).
    pub fn blocked(&self) -> Vec<GridCell> {
        self.grid.cell_at(self.jammer.position).into_iter().collect()
    }

    pub fn free_cells(&self) -> Vec<GridCell> {
        let blocked = self.blocked();
        self.grid.cells().filter(|c| !blocked.contains(c)).collect()
    }

    pub fn positions(&self, cells: &[GridCell]) -> Vec<Position> {
        cells.iter().map(|&c| self.grid.position(c)).collect()
    }

    pub fn decode(&self, chromosome: &Chromosome) -> Vec<UavState> {
        chromosome
            .genes
            .iter()
            .map(|g| UavState::new(self.grid.position(g.cell), g.beam_deg))
            .collect()
    }

    /// Beam-independent link data for a layout; draws shadowing from `rng`
    /// when the channel has a non-zero sigma.
    pub fn geometry(&self, cells: &[GridCell], rng: &mut ChaCha8Rng) -> Result<LinkGeometry> {
        let positions = self.positions(cells);
        if self.channel.is_deterministic() {
            LinkGeometry::new(&positions, &self.jammer, &self.channel)
        } else {
            LinkGeometry::with_shadowing(&positions, &self.jammer, &self.channel, rng)
        }
    }

    /// Objective of one beam vector on a precomputed geometry.
    pub fn evaluate(&self, geometry: &LinkGeometry, beams: &[f64]) -> f64 {
        let caps = geometry.capacities(beams, &self.pattern, &self.channel);
        let (avg, min) = e2e_aggregates(&caps);
        objective_from_aggregates(avg, min, &self.weights)
    }

    /// Decode, build the capacity matrix, route and score.
    pub fn fitness(&self, chromosome: &Chromosome, rng: &mut ChaCha8Rng) -> Result<f64> {
        let geometry = self.geometry(&chromosome.cells(), rng)?;
        Ok(self.evaluate(&geometry, &chromosome.beams()))
    }

    /// Beams do not matter when every UAV antenna is omnidirectional.
    pub fn beams_irrelevant(&self) -> bool {
        self.pattern.is_omnidirectional()
    }
}

/// Per-generation statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_of: f64,
    pub avg_of: f64,
    /// Objective evaluations so far (cumulative, including inner searches).
    pub evaluations: u64,
    /// Wall-clock seconds since the start of the run.
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaReport {
    pub best: Chromosome,
    pub best_of: f64,
    /// Generation 0 (initial population) followed by one entry per generation run.
    pub history: Vec<GenerationStats>,
    pub generations_run: usize,
    pub evaluations: u64,
    pub elapsed_s: f64,
}

impl GaReport {
    pub fn of_history(&self) -> Vec<f64> {
        self.history.iter().map(|h| h.best_of).collect()
    }
}

/// Independent ChaCha stream for `(seed, a, b)`.
pub fn substream(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    fn mix(mut z: u64) -> u64 {
        // splitmix64 finaliser
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    ChaCha8Rng::seed_from_u64(mix(mix(mix(seed) ^ a) ^ b.rotate_left(32)))
}

/// Between-generation wall-clock check. A new generation starts only if the
/// slowest generation seen so far would still fit in the budget; the first
/// generation after initialisation always runs.
#[derive(Debug)]
struct Budget {
    start: Instant,
    limit: Option<Duration>,
    last_mark: Instant,
    slowest: Duration,
}

impl Budget {
    fn new(limit_s: Option<f64>) -> Self {
        let now = Instant::now();
        Self {
            start: now,
            limit: limit_s.map(Duration::from_secs_f64),
            last_mark: now,
            slowest: Duration::ZERO,
        }
    }

    fn mark_generation(&mut self) {
        let now = Instant::now();
        self.slowest = self.slowest.max(now - self.last_mark);
        self.last_mark = now;
    }

    fn allows(&self, generation: usize) -> bool {
        match self.limit {
            None => true,
            Some(_) if generation <= 1 => true,
            Some(limit) => self.start.elapsed() + self.slowest <= limit,
        }
    }

    fn elapsed_s(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Index of the best fitness, lowest index on ties.
fn argmax(fitness: &[f64]) -> usize {
    let mut best = 0;
    for (i, &f) in fitness.iter().enumerate() {
        if f > fitness[best] {
            best = i;
        }
    }
    best
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}
