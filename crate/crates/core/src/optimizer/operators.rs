use rand::seq::IndexedRandom;
use rand::Rng;

use super::Chromosome;
use crate::channel::{normalize_deg, GridCell, GridSpec};

/// Largest beam deviation applied by [`mutate_beam`], degrees either way.
pub const BEAM_DEVIATION_DEG: f64 = 20.0;

/// Draws `size` indices uniformly with replacement and returns the fittest;
/// ties go to the lower index.
pub fn tournament_select<R: Rng + ?Sized>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    assert!(!fitness.is_empty(), "tournament over an empty population");
    let mut winner = rng.random_range(0..fitness.len());
    for _ in 1..size.max(1) {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] > fitness[winner] || (fitness[c] == fitness[winner] && c < winner) {
            winner = c;
        }
    }
    winner
}

/// Children `a[..k] ++ b[k..]` and `b[..k] ++ a[k..]`.
pub fn one_point_crossover<T: Clone>(a: &[T], b: &[T], k: usize) -> (Vec<T>, Vec<T>) {
    assert_eq!(a.len(), b.len(), "parents differ in length");
    let k = k.min(a.len());
    let ca = a[..k].iter().chain(&b[k..]).cloned().collect();
    let cb = b[..k].iter().chain(&a[k..]).cloned().collect();
    (ca, cb)
}

fn cut_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Option<usize> {
    (n >= 2).then(|| rng.random_range(1..n))
}

/// One-point crossover of whole genes (position and beam travel together)
/// at cut `k`, followed by co-location repair against each child's primary
/// parent.
pub fn crossover_positions_at<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    k: usize,
    grid: &GridSpec,
    blocked: &[GridCell],
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let (ga, gb) = one_point_crossover(&a.genes, &b.genes, k);
    let mut ca = Chromosome::new(ga);
    let mut cb = Chromosome::new(gb);
    repair(&mut ca, a, grid, blocked, rng);
    repair(&mut cb, b, grid, blocked, rng);
    (ca, cb)
}

/// Outer-GA crossover with a uniform cut in `1..n`.
pub fn crossover_positions<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    grid: &GridSpec,
    blocked: &[GridCell],
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    match cut_point(a.len(), rng) {
        Some(k) => crossover_positions_at(a, b, k, grid, blocked, rng),
        None => (a.clone(), b.clone()),
    }
}

/// Inner-GA crossover on raw beam vectors.
pub fn crossover_beam_vectors<R: Rng + ?Sized>(a: &[f64], b: &[f64], rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    match cut_point(a.len(), rng) {
        Some(k) => one_point_crossover(a, b, k),
        None => (a.to_vec(), b.to_vec()),
    }
}

/// Exchanges beam genes only; each child keeps its primary parent's positions.
pub fn crossover_beams<R: Rng + ?Sized>(a: &Chromosome, b: &Chromosome, rng: &mut R) -> (Chromosome, Chromosome) {
    let (ba, bb) = crossover_beam_vectors(&a.beams(), &b.beams(), rng);
    (a.with_beams(&ba), b.with_beams(&bb))
}

/// Moves each gene, with probability `rate`, to a uniformly chosen free
/// Moore neighbour. Genes with no free neighbour stay put.
pub fn mutate_position<R: Rng + ?Sized>(
    chromosome: &Chromosome,
    grid: &GridSpec,
    blocked: &[GridCell],
    rate: f64,
    rng: &mut R,
) -> Chromosome {
    let mut out = chromosome.clone();
    let mut options = Vec::with_capacity(8);
    for g in 0..out.genes.len() {
        if rng.random::<f64>() >= rate {
            continue;
        }
        let here = out.genes[g].cell;
        options.clear();
        options.extend(
            grid.neighbors(here)
                .filter(|c| !blocked.contains(c) && !out.genes.iter().any(|o| o.cell == *c)),
        );
        if let Some(&c) = options.choose(rng) {
            out.genes[g].cell = c;
        }
    }
    out
}

/// Adds a uniform deviation in `[-20, 20]` degrees to each beam with
/// probability `rate`.
pub fn mutate_beam_vector<R: Rng + ?Sized>(beams: &mut [f64], rate: f64, rng: &mut R) {
    for b in beams.iter_mut() {
        if rng.random::<f64>() < rate {
            *b = normalize_deg(*b + rng.random_range(-BEAM_DEVIATION_DEG..=BEAM_DEVIATION_DEG));
        }
    }
}

pub fn mutate_beam<R: Rng + ?Sized>(chromosome: &Chromosome, rate: f64, rng: &mut R) -> Chromosome {
    let mut beams = chromosome.beams();
    mutate_beam_vector(&mut beams, rate, rng);
    chromosome.with_beams(&beams)
}

/// Resolves co-located or blocked genes in place. Genes are visited in
/// order; a gene whose cell is taken moves to a random free neighbour, else
/// back to the primary parent's cell for that UAV, else to the nearest free
/// grid point.
pub fn repair<R: Rng + ?Sized>(
    child: &mut Chromosome,
    parent: &Chromosome,
    grid: &GridSpec,
    blocked: &[GridCell],
    rng: &mut R,
) {
    let cols = grid.cols() as usize;
    let mut taken = vec![false; grid.point_count()];
    let idx = |c: GridCell| c.row as usize * cols + c.col as usize;
    for c in blocked.iter().filter(|c| grid.contains(**c)) {
        taken[idx(*c)] = true;
    }
    let mut options = Vec::with_capacity(8);
    for g in 0..child.genes.len() {
        let cell = child.genes[g].cell;
        if grid.contains(cell) && !taken[idx(cell)] {
            taken[idx(cell)] = true;
            continue;
        }
        options.clear();
        if grid.contains(cell) {
            options.extend(grid.neighbors(cell).filter(|c| !taken[idx(*c)]));
        }
        let replacement = match options.choose(rng) {
            Some(&c) => c,
            None => match parent.genes.get(g).map(|p| p.cell) {
                Some(p) if grid.contains(p) && !taken[idx(p)] => p,
                _ => nearest_free(grid, cell, &taken, idx).expect("grid has room for every UAV"),
            },
        };
        child.genes[g].cell = replacement;
        taken[idx(replacement)] = true;
    }
}

fn nearest_free(grid: &GridSpec, from: GridCell, taken: &[bool], idx: impl Fn(GridCell) -> usize) -> Option<GridCell> {
    grid.cells().filter(|c| !taken[idx(*c)]).min_by_key(|c| {
        let dc = c.col as i64 - from.col as i64;
        let dr = c.row as i64 - from.row as i64;
        (dc * dc + dr * dr, c.row, c.col)
    })
}
