//! Experiment driver: beam steering for a fixed layout, joint layout and
//! beam search in a fixed area, and a sequence of searches while the
//! deployment area slides past a stationary jammer.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    capacity_matrix, capacity_matrix_shadowed, CapacityMatrix, ChannelParams, GridCell, GridSpec, Jammer, LinkGeometry,
    Position, RadiationPattern, UavState,
};
use crate::error::{Error, Result};
use crate::optimizer::{beam_search, outer_ga_seeded, substream, Chromosome, GaConfig, GaReport, Gene, SwarmEnv};
use crate::routing::{objective, shortest_paths, ObjectiveWeights, RoutingResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// UAVs pinned to `fixed_positions`; only beams are optimised.
    Static,
    /// Positions and beams optimised inside a fixed deployment area.
    FixedArea,
    /// The deployment area moves; the search is repeated every window.
    Moving,
}

fn default_speed() -> f64 {
    2.0
}
fn default_window() -> f64 {
    7.5
}
fn default_windows() -> usize {
    5
}
fn default_guard() -> f64 {
    0.1
}

/// Motion of the deployment area. Defaults: 2 m/s along +x, a new search
/// every 7.5 s, 10 % of each window held back as a guard margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionSpec {
    #[serde(default = "default_speed")]
    pub speed_mps: f64,
    #[serde(default)]
    pub heading_deg: f64,
    #[serde(default = "default_window")]
    pub window_s: f64,
    #[serde(default = "default_windows")]
    pub n_windows: usize,
    #[serde(default = "default_guard")]
    pub guard_fraction: f64,
}

impl Default for MotionSpec {
    fn default() -> Self {
        Self {
            speed_mps: default_speed(),
            heading_deg: 0.0,
            window_s: default_window(),
            n_windows: default_windows(),
            guard_fraction: default_guard(),
        }
    }
}

impl MotionSpec {
    /// Displacement of the area origin per window.
    pub fn step(&self) -> (f64, f64) {
        let dist = self.speed_mps * self.window_s;
        let h = self.heading_deg.to_radians();
        (dist * h.cos(), dist * h.sin())
    }

    /// Origin of window `w` given the origin of window 0.
    pub fn origin_at(&self, origin0: Position, w: usize) -> Position {
        let (dx, dy) = self.step();
        origin0.translated(w as f64 * dx, w as f64 * dy)
    }

    /// Search budget per window after the guard margin.
    pub fn search_budget_s(&self) -> f64 {
        self.window_s * (1.0 - self.guard_fraction)
    }
}

fn default_n_uav() -> usize {
    4
}

/// Omnidirectional 100 dBm jammer 10 m east of the default area, level with
/// its centre. A moving area heading along +x passes over it.
pub fn default_jammer() -> Jammer {
    Jammer::omni(Position::new(60.0, 20.0), 100.0)
}

/// Default layout for the fixed-position scenario (grid points of the
/// default area).
pub fn default_fixed_positions() -> Vec<Position> {
    vec![
        Position::new(10.0, 10.0),
        Position::new(35.0, 5.0),
        Position::new(15.0, 30.0),
        Position::new(40.0, 25.0),
    ]
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_n_uav")]
    pub n_uav: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_jammer")]
    pub jammer: Jammer,
    #[serde(default)]
    pub channel: ChannelParams,
    /// UAV antenna pattern; ignored when `omnidirectional` is set.
    #[serde(default)]
    pub pattern: RadiationPattern,
    /// Use 0 dBi omnidirectional antennas instead of `pattern`.
    #[serde(default)]
    pub omnidirectional: bool,
    #[serde(default)]
    pub objective: ObjectiveWeights,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_positions: Option<Vec<Position>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion: Option<MotionSpec>,
}

impl ScenarioConfig {
    /// Defaults for `kind`, including the fixed layout or motion block it needs.
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            n_uav: default_n_uav(),
            grid: GridSpec::default(),
            jammer: default_jammer(),
            channel: ChannelParams::default(),
            pattern: RadiationPattern::default(),
            omnidirectional: false,
            objective: ObjectiveWeights::default(),
            ga: GaConfig::default(),
            fixed_positions: (kind == ScenarioKind::Static).then(default_fixed_positions),
            motion: (kind == ScenarioKind::Moving).then(MotionSpec::default),
        }
    }

    pub fn effective_pattern(&self) -> RadiationPattern {
        if self.omnidirectional {
            RadiationPattern::omnidirectional(0.0)
        } else {
            self.pattern.clone()
        }
    }

    pub fn env(&self) -> SwarmEnv {
        SwarmEnv {
            n_uav: self.n_uav,
            grid: self.grid,
            jammer: self.jammer.clone(),
            pattern: self.effective_pattern(),
            channel: self.channel,
            weights: self.objective,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_uav < 2 {
            return Err(Error::config("n_uav", "need at least 2 UAVs"));
        }
        self.grid.validate()?;
        self.jammer.validate()?;
        self.channel.validate()?;
        self.objective.validate()?;
        self.ga.validate()?;
        match (self.kind, &self.fixed_positions) {
            (ScenarioKind::Static, None) => {
                return Err(Error::config("fixed_positions", "required for kind \"static\""))
            }
            (ScenarioKind::Static, Some(pos)) => {
                if pos.len() != self.n_uav {
                    return Err(Error::config(
                        "fixed_positions",
                        format!("has {} entries, n_uav is {}", pos.len(), self.n_uav),
                    ));
                }
                for (k, p) in pos.iter().enumerate() {
                    if self.grid.cell_at(*p).is_none() {
                        return Err(Error::config(
                            format!("fixed_positions[{k}]"),
                            format!("{p} is not a grid point"),
                        ));
                    }
                    if pos[..k].contains(p) {
                        return Err(Error::config(
                            format!("fixed_positions[{k}]"),
                            format!("{p} is used twice"),
                        ));
                    }
                    if !self.jammer.is_off() && *p == self.jammer.position {
                        return Err(Error::config(
                            format!("fixed_positions[{k}]"),
                            "coincides with the jammer",
                        ));
                    }
                }
            }
            (_, Some(_)) => return Err(Error::config("fixed_positions", "only allowed for kind \"static\"")),
            _ => {}
        }
        match (self.kind, &self.motion) {
            (ScenarioKind::Moving, None) => return Err(Error::config("motion", "required for kind \"moving\"")),
            (ScenarioKind::Moving, Some(m)) => {
                if !(m.speed_mps >= 0.0 && m.speed_mps.is_finite()) {
                    return Err(Error::config("motion.speed_mps", "must be >= 0"));
                }
                if !(m.window_s > 0.0 && m.window_s.is_finite()) {
                    return Err(Error::config("motion.window_s", "must be > 0"));
                }
                if m.n_windows == 0 {
                    return Err(Error::config("motion.n_windows", "must be >= 1"));
                }
                if !(0.0..1.0).contains(&m.guard_fraction) {
                    return Err(Error::config("motion.guard_fraction", "must lie in [0, 1)"));
                }
                if !m.heading_deg.is_finite() {
                    return Err(Error::config("motion.heading_deg", "must be finite"));
                }
            }
            (_, Some(_)) => return Err(Error::config("motion", "only allowed for kind \"moving\"")),
            _ => {}
        }
        if self.kind != ScenarioKind::Static && self.env().free_cells().len() < self.n_uav {
            return Err(Error::config("grid", "fewer free grid points than UAVs"));
        }
        Ok(())
    }
}

/// Decoded best configuration of one search with its routing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub grid: GridSpec,
    pub jammer: Jammer,
    pub cells: Vec<GridCell>,
    pub uavs: Vec<UavState>,
    pub capacity: CapacityMatrix,
    pub routing: RoutingResult,
    pub of: f64,
    pub e2e_avg: f64,
    pub e2e_min: f64,
}

impl Snapshot {
    /// Re-derives capacities and routes for `best` on `env`. With shadowing
    /// enabled, the draws come from `(seed, window)`.
    pub fn build(env: &SwarmEnv, best: &Chromosome, seed: u64, window: usize) -> Result<Self> {
        let uavs = env.decode(best);
        let capacity = if env.channel.is_deterministic() {
            capacity_matrix(&uavs, &env.jammer, &env.pattern, &env.channel)?
        } else {
            let mut rng = substream(seed, u64::MAX - 2, window as u64);
            capacity_matrix_shadowed(&uavs, &env.jammer, &env.pattern, &env.channel, &mut rng)?
        };
        let routing = shortest_paths(&capacity);
        Ok(Self {
            grid: env.grid,
            jammer: env.jammer.clone(),
            cells: best.cells(),
            of: objective(&routing, &env.weights),
            e2e_avg: routing.e2e_avg(),
            e2e_min: routing.e2e_min(),
            uavs,
            capacity,
            routing,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub window_index: usize,
    pub area_origin: Position,
    pub report: GaReport,
    pub snapshot: Snapshot,
}

/// Result of the fixed-position scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticRun {
    pub record: WindowRecord,
    /// Objective of the same layout with omnidirectional antennas.
    pub omni_baseline_of: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub kind: ScenarioKind,
    pub windows: Vec<WindowRecord>,
    pub omni_baseline_of: Option<f64>,
}

fn expect_kind(config: &ScenarioConfig, kind: ScenarioKind) -> Result<()> {
    if config.kind != kind {
        return Err(Error::config(
            "kind",
            format!("expected {kind:?}, got {:?}", config.kind),
        ));
    }
    config.validate()
}

/// Beam search with the UAVs pinned to `fixed_positions`, using the main GA
/// population and generation counts.
pub fn run_static(config: &ScenarioConfig) -> Result<StaticRun> {
    expect_kind(config, ScenarioKind::Static)?;
    let env = config.env();
    let positions = config.fixed_positions.as_deref().unwrap_or_default();
    let cells: Vec<GridCell> = positions
        .iter()
        .map(|p| config.grid.cell_at(*p).expect("validated"))
        .collect();
    let seed = config.ga.rng_seed;
    let mut rng = substream(seed, 0, 0);
    let geometry = env.geometry(&cells, &mut rng)?;
    let found = beam_search(&geometry, &env, &config.ga.as_beam_search(), &[], &mut rng);

    let omni_env = SwarmEnv {
        pattern: RadiationPattern::omnidirectional(0.0),
        ..env.clone()
    };
    let omni_baseline_of = omni_env.evaluate(&geometry, &vec![0.0; cells.len()]);

    let best = Chromosome::new(cells.iter().zip(&found.beams).map(|(&c, &b)| Gene::new(c, b)).collect());
    let elapsed_s = found.history.last().map_or(0.0, |h| h.elapsed_s);
    let report = GaReport {
        best_of: found.best_of,
        generations_run: found.history.len().saturating_sub(1),
        evaluations: found.evaluations,
        history: found.history,
        elapsed_s,
        best: best.clone(),
    };
    let snapshot = Snapshot::build(&env, &best, seed, 0)?;
    Ok(StaticRun {
        record: WindowRecord {
            window_index: 0,
            area_origin: config.grid.origin,
            report,
            snapshot,
        },
        omni_baseline_of,
    })
}

/// Joint position and beam search in the configured area.
pub fn run_fixed_area(config: &ScenarioConfig) -> Result<WindowRecord> {
    expect_kind(config, ScenarioKind::FixedArea)?;
    let env = config.env();
    let report = outer_ga_seeded(&env, &config.ga, &[])?;
    let snapshot = Snapshot::build(&env, &report.best, config.ga.rng_seed, 0)?;
    Ok(WindowRecord {
        window_index: 0,
        area_origin: config.grid.origin,
        report,
        snapshot,
    })
}

/// One search per time window while the area moves. Each window starts from
/// the previous window's best formation (same grid indices, so the formation
/// moves with the area) and is limited to the window minus its guard margin.
pub fn run_moving(config: &ScenarioConfig) -> Result<Vec<WindowRecord>> {
    expect_kind(config, ScenarioKind::Moving)?;
    let motion = config.motion.expect("validated");
    let mut records: Vec<WindowRecord> = Vec::with_capacity(motion.n_windows);
    let budget = match config.ga.time_budget_s {
        Some(t) => t.min(motion.search_budget_s()),
        None => motion.search_budget_s(),
    };
    let mut seeds: Vec<Chromosome> = Vec::new();
    for w in 0..motion.n_windows {
        let origin = motion.origin_at(config.grid.origin, w);
        let mut env = config.env();
        env.grid.origin = origin;
        let ga = GaConfig {
            time_budget_s: Some(budget),
            rng_seed: substream(config.ga.rng_seed, w as u64, 0).random(),
            ..config.ga.clone()
        };
        let report = outer_ga_seeded(&env, &ga, &seeds)?;
        if report.elapsed_s > motion.window_s {
            log::warn!(
                "window {w}: search took {:.2} s, longer than the {:.2} s window",
                report.elapsed_s,
                motion.window_s
            );
        } else if report.generations_run < 2 && config.ga.max_generations >= 2 {
            log::warn!("window {w}: budget of {budget:.2} s fits fewer than two generations");
        }
        let snapshot = Snapshot::build(&env, &report.best, config.ga.rng_seed, w)?;
        seeds = vec![report.best.clone()];
        records.push(WindowRecord {
            window_index: w,
            area_origin: origin,
            report,
            snapshot,
        });
    }
    Ok(records)
}

pub fn run(config: &ScenarioConfig) -> Result<ScenarioOutcome> {
    Ok(match config.kind {
        ScenarioKind::Static => {
            let r = run_static(config)?;
            ScenarioOutcome {
                kind: config.kind,
                windows: vec![r.record],
                omni_baseline_of: Some(r.omni_baseline_of),
            }
        }
        ScenarioKind::FixedArea => ScenarioOutcome {
            kind: config.kind,
            windows: vec![run_fixed_area(config)?],
            omni_baseline_of: None,
        },
        ScenarioKind::Moving => ScenarioOutcome {
            kind: config.kind,
            windows: run_moving(config)?,
            omni_baseline_of: None,
        },
    })
}

/// Objective of a fixed layout and beam vector, without any search.
pub fn evaluate_layout(config: &ScenarioConfig, positions: &[Position], beams: &[f64]) -> Result<f64> {
    let env = config.env();
    let geometry = LinkGeometry::new(positions, &env.jammer, &env.channel)?;
    Ok(env.evaluate(&geometry, beams))
}
