//! File-level front end: config loading, run output layout and run
//! comparison. `main.rs` only maps command-line arguments onto these.
//!
//! A run directory holds
//! * `convergence.csv`: `window,generation,best_of,avg_of,evaluations`, one row
//!   per generation including generation 0;
//! * `timing.csv`: `window,generation,elapsed_s` (wall clock, not reproducible);
//! * `topology_<w>.json` and `topology_<w>.svg` for every window;
//! * `manifest.json`: the resolved config plus seed, version and start time.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{CapacityMatrix, GridCell, Jammer, Position, RadiationPattern, UavState};
use crate::error::{Error, Result};
use crate::scenario::{self, ScenarioConfig, ScenarioKind, WindowRecord};
use crate::svg;

pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const TIMING_FILE: &str = "timing.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn topology_json_name(window: usize) -> String {
    format!("topology_{window}.json")
}

pub fn topology_svg_name(window: usize) -> String {
    format!("topology_{window}.svg")
}

/// Parses and validates a scenario config. A string `pattern` is read as a
/// pattern file path, relative to the config file's directory.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base)
}

/// Like [`parse_config`] for in-memory text; pattern paths resolve against `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<ScenarioConfig> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| Error::json("config", e))?;
    if let Some(Value::String(rel)) = value.get("pattern") {
        let pattern_path = base.join(rel);
        let pattern = RadiationPattern::from_file(&pattern_path)?;
        value["pattern"] = serde_json::to_value(pattern).map_err(|e| Error::json("pattern", e))?;
    }
    let config: ScenarioConfig = serde_json::from_value(value).map_err(|e| Error::json("config", e))?;
    config.validate()?;
    Ok(config)
}

pub fn config_to_json(config: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serialises")
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunFlags {
    pub seed: Option<u64>,
    pub omni: bool,
    pub time_budget_s: Option<f64>,
    pub sequential: bool,
}

impl RunFlags {
    pub fn apply(&self, config: &ScenarioConfig) -> Result<ScenarioConfig> {
        let mut c = config.clone();
        if let Some(s) = self.seed {
            c.ga.rng_seed = s;
        }
        if self.omni {
            c.omnidirectional = true;
        }
        if let Some(t) = self.time_budget_s {
            c.ga.time_budget_s = Some(t);
        }
        if self.sequential {
            c.ga.parallel = false;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_path: PathBuf,
    pub config: ScenarioConfig,
    pub rng_seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch when the run started.
    pub started_unix_s: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyUav {
    pub cell: GridCell,
    pub position: Position,
    pub beam_deg: f64,
}

/// Contents of `topology_<w>.json`. Capacities and data rates in bps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub kind: ScenarioKind,
    pub window_index: usize,
    pub area_origin: Position,
    pub jammer: Jammer,
    pub uavs: Vec<TopologyUav>,
    pub capacity_bps: CapacityMatrix,
    pub e2e_bps: Vec<Vec<f64>>,
    pub paths: Vec<Vec<Vec<usize>>>,
    pub of: f64,
    pub e2e_avg_bps: f64,
    pub e2e_min_bps: f64,
    pub generations_run: usize,
    pub evaluations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omni_baseline_of: Option<f64>,
}

impl Topology {
    fn from_record(kind: ScenarioKind, r: &WindowRecord, omni_baseline_of: Option<f64>) -> Self {
        let s = &r.snapshot;
        Self {
            kind,
            window_index: r.window_index,
            area_origin: r.area_origin,
            jammer: s.jammer.clone(),
            uavs: s
                .cells
                .iter()
                .zip(&s.uavs)
                .map(|(&cell, u): (&GridCell, &UavState)| TopologyUav {
                    cell,
                    position: u.position,
                    beam_deg: u.beam_deg,
                })
                .collect(),
            capacity_bps: s.capacity.clone(),
            e2e_bps: s.routing.e2e_rows().to_vec(),
            paths: s.routing.paths().to_vec(),
            of: s.of,
            e2e_avg_bps: s.e2e_avg,
            e2e_min_bps: s.e2e_min,
            generations_run: r.report.generations_run,
            evaluations: r.report.evaluations,
            omni_baseline_of,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub kind: ScenarioKind,
    pub windows: usize,
    pub final_of: f64,
    pub omni_baseline_of: Option<f64>,
    pub elapsed_s: f64,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}: {} window(s), final OF {:.6e}, {:.2} s",
            self.kind, self.windows, self.final_of, self.elapsed_s
        )?;
        if let Some(b) = self.omni_baseline_of {
            write!(f, ", omnidirectional baseline {b:.6e}")?;
        }
        Ok(())
    }
}

pub fn convergence_csv(windows: &[WindowRecord]) -> String {
    let mut out = String::from("window,generation,best_of,avg_of,evaluations\n");
    for r in windows {
        for h in &r.report.history {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.window_index, h.generation, h.best_of, h.avg_of, h.evaluations
            ));
        }
    }
    out
}

pub fn timing_csv(windows: &[WindowRecord]) -> String {
    let mut out = String::from("window,generation,elapsed_s\n");
    for r in windows {
        for h in &r.report.history {
            out.push_str(&format!("{},{},{}\n", r.window_index, h.generation, h.elapsed_s));
        }
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let p = dir.join(name);
    fs::write(&p, contents).map_err(|e| Error::io(p, e))
}

/// Runs `config` (after applying `flags`) and writes the outputs into `out_dir`.
pub fn run(config: &ScenarioConfig, config_path: &Path, out_dir: &Path, flags: &RunFlags) -> Result<RunSummary> {
    let config = flags.apply(config)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let started_unix_s = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let manifest = RunManifest {
        config_path: config_path.to_path_buf(),
        config: config.clone(),
        rng_seed: config.ga.rng_seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_s,
    };
    write(
        out_dir,
        MANIFEST_FILE,
        &serde_json::to_string_pretty(&manifest).map_err(|e| Error::json("manifest", e))?,
    )?;

    log::info!("running {:?} scenario, seed {}", config.kind, config.ga.rng_seed);
    let outcome = scenario::run(&config)?;

    write(out_dir, CONVERGENCE_FILE, &convergence_csv(&outcome.windows))?;
    write(out_dir, TIMING_FILE, &timing_csv(&outcome.windows))?;
    for r in &outcome.windows {
        let topo = Topology::from_record(config.kind, r, outcome.omni_baseline_of);
        let json = serde_json::to_string_pretty(&topo).map_err(|e| Error::json("topology", e))?;
        write(out_dir, &topology_json_name(r.window_index), &json)?;
        let title = format!(
            "{:?} window {} (seed {})",
            config.kind, r.window_index, config.ga.rng_seed
        );
        write(
            out_dir,
            &topology_svg_name(r.window_index),
            &svg::render(&r.snapshot, &title),
        )?;
    }

    let last = outcome.windows.last().expect("at least one window");
    Ok(RunSummary {
        kind: config.kind,
        windows: outcome.windows.len(),
        final_of: last.snapshot.of,
        omni_baseline_of: outcome.omni_baseline_of,
        elapsed_s: outcome.windows.iter().map(|r| r.report.elapsed_s).sum(),
    })
}

/// Headline numbers of one run directory (its last window).
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub dir: PathBuf,
    pub kind: ScenarioKind,
    pub of: f64,
    pub e2e_avg_bps: f64,
    pub e2e_min_bps: f64,
    /// `(window, generation, best_of)` from the convergence file.
    pub history: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationDelta {
    pub window: usize,
    pub generation: usize,
    pub a: f64,
    pub b: f64,
}

impl GenerationDelta {
    pub fn delta(&self) -> f64 {
        self.a - self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a: RunStats,
    pub b: RunStats,
    /// `a.of / b.of`; infinite when only `b` is zero, 1 when both are.
    pub of_ratio: f64,
    /// Rows present in both runs.
    pub deltas: Vec<GenerationDelta>,
}

pub fn of_ratio(a: f64, b: f64) -> f64 {
    match (a == 0.0, b == 0.0) {
        (true, true) => 1.0,
        (false, true) => f64::INFINITY,
        _ => a / b,
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
}

pub fn load_run(dir: &Path) -> Result<RunStats> {
    let manifest: RunManifest = read_json(&dir.join(MANIFEST_FILE))?;
    let csv_path = dir.join(CONVERGENCE_FILE);
    let csv = fs::read_to_string(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut history = Vec::new();
    for (k, line) in csv.lines().enumerate().skip(1) {
        let bad = || Error::Compare(format!("{}: malformed line {}", csv_path.display(), k + 1));
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 3 {
            return Err(bad());
        }
        history.push((
            cols[0].parse().map_err(|_| bad())?,
            cols[1].parse().map_err(|_| bad())?,
            cols[2].parse().map_err(|_| bad())?,
        ));
    }
    let last_window = history
        .iter()
        .map(|h| h.0)
        .max()
        .ok_or_else(|| Error::Compare(format!("{} has no rows", csv_path.display())))?;
    let topo: Topology = read_json(&dir.join(topology_json_name(last_window)))?;
    Ok(RunStats {
        dir: dir.to_path_buf(),
        kind: manifest.config.kind,
        of: topo.of,
        e2e_avg_bps: topo.e2e_avg_bps,
        e2e_min_bps: topo.e2e_min_bps,
        history,
    })
}

pub fn compare(dir_a: &Path, dir_b: &Path) -> Result<Comparison> {
    let a = load_run(dir_a)?;
    let b = load_run(dir_b)?;
    if a.kind != b.kind {
        return Err(Error::Compare(format!(
            "scenario kinds differ ({:?} vs {:?})",
            a.kind, b.kind
        )));
    }
    let deltas = a
        .history
        .iter()
        .filter_map(|&(w, g, va)| {
            b.history
                .iter()
                .find(|&&(wb, gb, _)| wb == w && gb == g)
                .map(|&(_, _, vb)| GenerationDelta {
                    window: w,
                    generation: g,
                    a: va,
                    b: vb,
                })
        })
        .collect();
    Ok(Comparison {
        of_ratio: of_ratio(a.of, b.of),
        a,
        b,
        deltas,
    })
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: {:?}", self.a.kind)?;
        for (tag, r) in [("A", &self.a), ("B", &self.b)] {
            writeln!(
                f,
                "{tag} {}: OF {:.6e}, avg E2E {:.6e} bps, bottleneck E2E {:.6e} bps",
                r.dir.display(),
                r.of,
                r.e2e_avg_bps,
                r.e2e_min_bps
            )?;
        }
        writeln!(f, "OF ratio A/B: {:.6e}", self.of_ratio)?;
        writeln!(f, "window,generation,best_of_a,best_of_b,delta")?;
        for d in &self.deltas {
            writeln!(f, "{},{},{},{},{}", d.window, d.generation, d.a, d.b, d.delta())?;
        }
        Ok(())
    }
}
