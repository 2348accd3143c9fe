//! Routing over the capacity graph and the swarm objective.
//!
//! Each directed link gets weight `1 / C`, Dijkstra picks the minimum-weight
//! path for every ordered pair, and the end-to-end capacity of a pair is the
//! bottleneck (smallest link capacity) along that path. The minimum-weight
//! path is not always the widest path; this is intentional.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::channel::CapacityMatrix;
use crate::error::{Error, Result};

/// Weight of a link with the given capacity; zero capacity means no link.
#[inline]
pub fn link_weight(capacity: f64) -> f64 {
    if capacity > 0.0 {
        1.0 / capacity
    } else {
        f64::INFINITY
    }
}

/// End-to-end capacities and chosen paths for every ordered pair of nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingResult {
    n: usize,
    /// `e2e[i][j]`, bps. The diagonal is 0 and excluded from aggregates.
    e2e: Vec<Vec<f64>>,
    /// `paths[i][j]`: node sequence from i to j, empty when unreachable.
    paths: Vec<Vec<Vec<usize>>>,
}

impl RoutingResult {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn e2e(&self, from: usize, to: usize) -> f64 {
        self.e2e[from][to]
    }

    pub fn path(&self, from: usize, to: usize) -> &[usize] {
        &self.paths[from][to]
    }

    pub fn e2e_rows(&self) -> &[Vec<f64>] {
        &self.e2e
    }

    pub fn paths(&self) -> &[Vec<Vec<usize>>] {
        &self.paths
    }

    /// End-to-end capacities over all ordered pairs `i != j`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        self.e2e
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, &c)| c))
    }

    pub fn e2e_avg(&self) -> f64 {
        let (sum, count) = self.off_diagonal().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    pub fn e2e_min(&self) -> f64 {
        let m = self.off_diagonal().fold(f64::INFINITY, f64::min);
        if m.is_finite() {
            m
        } else {
            0.0
        }
    }
}

/// Sum of link weights along `path`, accumulated from the source.
pub fn path_weight(matrix: &CapacityMatrix, path: &[usize]) -> f64 {
    path.windows(2)
        .fold(0.0, |acc, w| acc + link_weight(matrix.get(w[0], w[1])))
}

/// Smallest link capacity along `path` (0 for an empty path).
pub fn path_bottleneck(matrix: &CapacityMatrix, path: &[usize]) -> f64 {
    if path.len() < 2 {
        return 0.0;
    }
    path.windows(2)
        .map(|w| matrix.get(w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Single-source Dijkstra state, reused across sources.
struct Search {
    dist: Vec<f64>,
    pred: Vec<usize>,
    /// Bottleneck capacity of the current best path to each node.
    neck: Vec<f64>,
    settled: Vec<bool>,
}

const NONE: usize = usize::MAX;

impl Search {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; n],
            pred: vec![NONE; n],
            neck: vec![0.0; n],
            settled: vec![false; n],
        }
    }

    fn path_to(&self, v: usize) -> Vec<usize> {
        let mut p = vec![v];
        let mut cur = v;
        while self.pred[cur] != NONE {
            cur = self.pred[cur];
            p.push(cur);
        }
        p.reverse();
        p
    }

    /// Whether the path through `u` then `v` sorts before the stored path to `w`.
    fn extends_before(&self, u: usize, v: usize, w: usize) -> bool {
        let mut a = self.path_to(u);
        a.push(v);
        a < self.path_to(w)
    }

    fn run(&mut self, matrix: &CapacityMatrix, src: usize) {
        let n = matrix.len();
        self.dist.fill(f64::INFINITY);
        self.pred.fill(NONE);
        self.neck.fill(0.0);
        self.settled.fill(false);
        self.dist[src] = 0.0;
        self.neck[src] = f64::INFINITY;
        loop {
            let mut u = NONE;
            for v in 0..n {
                if self.settled[v] || !self.dist[v].is_finite() {
                    continue;
                }
                if u == NONE
                    || self.dist[v] < self.dist[u]
                    || (self.dist[v] == self.dist[u] && self.path_to(v) < self.path_to(u))
                {
                    u = v;
                }
            }
            if u == NONE {
                break;
            }
            self.settled[u] = true;
            for v in 0..n {
                if self.settled[v] {
                    continue;
                }
                let c = matrix.get(u, v);
                let w = link_weight(c);
                if !w.is_finite() {
                    continue;
                }
                let cand = self.dist[u] + w;
                let better = match cand.partial_cmp(&self.dist[v]) {
                    Some(Ordering::Less) => true,
                    Some(Ordering::Equal) => self.extends_before(u, v, v),
                    _ => false,
                };
                if better {
                    self.dist[v] = cand;
                    self.pred[v] = u;
                    self.neck[v] = self.neck[u].min(c);
                }
            }
        }
    }
}

/// Minimum `Σ 1/C` routes for every ordered pair.
///
/// Equal-weight paths are resolved by lexicographic order of their node
/// sequences. Unreachable pairs get capacity 0 and an empty path.
pub fn shortest_paths(matrix: &CapacityMatrix) -> RoutingResult {
    let n = matrix.len();
    let mut e2e = vec![vec![0.0; n]; n];
    let mut paths = vec![vec![Vec::new(); n]; n];
    // dense O(n^2) Dijkstra per source: swarms are small and fully meshed
    let mut search = Search::new(n);
    for src in 0..n {
        search.run(matrix, src);
        for dst in 0..n {
            if dst == src || !search.dist[dst].is_finite() {
                continue;
            }
            e2e[src][dst] = search.neck[dst];
            paths[src][dst] = search.path_to(dst);
        }
    }
    RoutingResult { n, e2e, paths }
}

/// Average and minimum end-to-end capacity over ordered pairs, without
/// materialising the paths. Equal to `(r.e2e_avg(), r.e2e_min())` of
/// [`shortest_paths`].
pub fn e2e_aggregates(matrix: &CapacityMatrix) -> (f64, f64) {
    let n = matrix.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let mut search = Search::new(n);
    let (mut sum, mut min) = (0.0, f64::INFINITY);
    for src in 0..n {
        search.run(matrix, src);
        for dst in 0..n {
            if dst == src {
                continue;
            }
            let c = if search.dist[dst].is_finite() {
                search.neck[dst]
            } else {
                0.0
            };
            sum += c;
            min = min.min(c);
        }
    }
    (sum / (n * (n - 1)) as f64, min)
}

/// Exponents of the average and bottleneck terms of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveWeights {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }
}

impl ObjectiveWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::config("objective.alpha", "must be finite and >= 0"));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::config("objective.beta", "must be finite and >= 0"));
        }
        if self.alpha == 0.0 && self.beta == 0.0 {
            return Err(Error::config("objective", "alpha and beta cannot both be 0"));
        }
        Ok(())
    }
}

/// `C_avg^alpha * C_min^beta` over all ordered pairs.
pub fn objective(routing: &RoutingResult, weights: &ObjectiveWeights) -> f64 {
    objective_from_aggregates(routing.e2e_avg(), routing.e2e_min(), weights)
}

pub fn objective_from_aggregates(avg: f64, min: f64, weights: &ObjectiveWeights) -> f64 {
    let term = |x: f64, e: f64| if e == 0.0 { 1.0 } else { x.powf(e) };
    term(avg, weights.alpha) * term(min, weights.beta)
}
