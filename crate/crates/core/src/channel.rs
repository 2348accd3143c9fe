//! Radio channel between UAVs: log-distance path loss, antenna gains taken
//! from a sampled radiation pattern, received and interference power, SINR,
//! and the Shannon capacity of every directed link.
//!
//! Angles are degrees, counterclockwise from +x, stored in `[0, 360)`.
//! Powers are dBm, gains dBi, losses dB and capacities bps.

use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into `[0, 360)`.
pub fn normalize_deg(angle: f64) -> f64 {
    let a = angle.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}

/// Converts dBm to milliwatts. `-inf` maps to 0 mW.
#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    if dbm == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf(dbm / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Position {
        Position::new(self.x + dx, self.y + dy)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Integer coordinates of a point on a [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCell {
    pub col: u32,
    pub row: u32,
}

impl GridCell {
    pub const fn new(col: u32, row: u32) -> Self {
        Self { col, row }
    }
}

/// A rectangular deployment area discretised into points `spacing` metres
/// apart. Both edges are included, so a 50 m x 40 m area at 5 m spacing has
/// 11 x 9 points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub origin: Position,
    pub width: f64,
    pub height: f64,
    pub spacing: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            origin: Position::new(0.0, 0.0),
            width: 50.0,
            height: 40.0,
            spacing: 5.0,
        }
    }
}

fn whole_multiple(length: f64, spacing: f64) -> Option<u32> {
    let steps = (length / spacing).round();
    if steps < 1.0 || steps > u32::MAX as f64 - 1.0 {
        return None;
    }
    if (steps * spacing - length).abs() <= 1e-9 * length.abs().max(1.0) {
        Some(steps as u32)
    } else {
        None
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.origin.is_finite() {
            return Err(Error::config("grid.origin", "coordinates must be finite"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::config("grid.spacing", "must be > 0"));
        }
        if self.width.is_nan() || self.width <= 0.0 || whole_multiple(self.width, self.spacing).is_none() {
            return Err(Error::config(
                "grid.width",
                format!("must be a positive multiple of spacing {}", self.spacing),
            ));
        }
        if self.height.is_nan() || self.height <= 0.0 || whole_multiple(self.height, self.spacing).is_none() {
            return Err(Error::config(
                "grid.height",
                format!("must be a positive multiple of spacing {}", self.spacing),
            ));
        }
        Ok(())
    }

    /// Number of grid columns (points along x).
    pub fn cols(&self) -> u32 {
        whole_multiple(self.width, self.spacing).unwrap_or(0) + 1
    }

    /// Number of grid rows (points along y).
    pub fn rows(&self) -> u32 {
        whole_multiple(self.height, self.spacing).unwrap_or(0) + 1
    }

    pub fn point_count(&self) -> usize {
        self.cols() as usize * self.rows() as usize
    }

    pub fn contains(&self, cell: GridCell) -> bool {
        cell.col < self.cols() && cell.row < self.rows()
    }

    pub fn position(&self, cell: GridCell) -> Position {
        Position::new(
            self.origin.x + cell.col as f64 * self.spacing,
            self.origin.y + cell.row as f64 * self.spacing,
        )
    }

    /// The grid point exactly at `pos`, if any.
    pub fn cell_at(&self, pos: Position) -> Option<GridCell> {
        let c = (pos.x - self.origin.x) / self.spacing;
        let r = (pos.y - self.origin.y) / self.spacing;
        let (cr, rr) = (c.round(), r.round());
        if cr < 0.0 || rr < 0.0 {
            return None;
        }
        let cell = GridCell::new(cr as u32, rr as u32);
        (self.contains(cell) && self.position(cell) == pos).then_some(cell)
    }

    /// In-bounds Moore neighbours of `cell` (up to 8), in row-major order.
    pub fn neighbors(&self, cell: GridCell) -> impl Iterator<Item = GridCell> + '_ {
        const OFFSETS: [(i64, i64); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
        OFFSETS.iter().filter_map(move |&(dc, dr)| {
            let c = cell.col as i64 + dc;
            let r = cell.row as i64 + dr;
            if c < 0 || r < 0 {
                return None;
            }
            let n = GridCell::new(c as u32, r as u32);
            self.contains(n).then_some(n)
        })
    }

    pub fn cells(&self) -> impl Iterator<Item = GridCell> {
        let (cols, rows) = (self.cols(), self.rows());
        (0..rows).flat_map(move |r| (0..cols).map(move |c| GridCell::new(c, r)))
    }

    /// The same grid with its origin moved by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> GridSpec {
        GridSpec {
            origin: self.origin.translated(dx, dy),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSample {
    pub angle_deg: f64,
    pub gain_dbi: f64,
}

/// Antenna gain as a function of the angle off boresight, sampled on a table
/// and linearly interpolated in dB with wrap-around at 360°.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RadiationPattern {
    samples: Vec<PatternSample>,
}

impl<'de> Deserialize<'de> for RadiationPattern {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let samples = Vec::<PatternSample>::deserialize(de)?;
        RadiationPattern::new(samples).map_err(serde::de::Error::custom)
    }
}

const DEFAULT_PATTERN_JSON: &str = include_str!("../data/default_pattern.json");

impl RadiationPattern {
    pub fn new(samples: Vec<PatternSample>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::config("pattern", "needs at least one sample"))?;
        if first.angle_deg != 0.0 {
            return Err(Error::config("pattern", "first sample must be at 0 degrees"));
        }
        for (k, s) in samples.iter().enumerate() {
            if !(0.0..360.0).contains(&s.angle_deg) {
                return Err(Error::config(
                    format!("pattern[{k}].angle_deg"),
                    format!("{} is outside [0, 360)", s.angle_deg),
                ));
            }
            if !s.gain_dbi.is_finite() {
                return Err(Error::config(format!("pattern[{k}].gain_dbi"), "must be finite"));
            }
            if k > 0 && s.angle_deg <= samples[k - 1].angle_deg {
                return Err(Error::config(
                    format!("pattern[{k}].angle_deg"),
                    "angles must be strictly increasing",
                ));
            }
        }
        Ok(Self { samples })
    }

    pub fn omnidirectional(gain_dbi: f64) -> Self {
        Self {
            samples: vec![PatternSample {
                angle_deg: 0.0,
                gain_dbi,
            }],
        }
    }

    /// A 16-point directional pattern: +9 dBi at boresight falling to
    /// -10 dBi at 180°.
    pub fn default_directional() -> Self {
        Self::from_json_str(DEFAULT_PATTERN_JSON).expect("bundled pattern is valid")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json("radiation pattern", e))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
    }

    pub fn samples(&self) -> &[PatternSample] {
        &self.samples
    }

    pub fn is_omnidirectional(&self) -> bool {
        self.samples.len() == 1
    }

    pub fn max_gain(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.gain_dbi)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gain at `relative_deg` off boresight (any real angle).
    pub fn gain_at(&self, relative_deg: f64) -> f64 {
        let s = &self.samples;
        if s.len() == 1 {
            return s[0].gain_dbi;
        }
        let a = normalize_deg(relative_deg);
        // index of the last sample with angle <= a; s[0] is at 0 so it exists
        let k = s.partition_point(|p| p.angle_deg <= a) - 1;
        let lo = s[k];
        let (hi_angle, hi_gain) = match s.get(k + 1) {
            Some(hi) => (hi.angle_deg, hi.gain_dbi),
            None => (360.0, s[0].gain_dbi),
        };
        let t = (a - lo.angle_deg) / (hi_angle - lo.angle_deg);
        lo.gain_dbi + t * (hi_gain - lo.gain_dbi)
    }
}

impl Default for RadiationPattern {
    fn default() -> Self {
        Self::default_directional()
    }
}

/// Link-budget parameters. Defaults follow the reference swarm set-up
/// (B = 2.4e9 Hz, Pt = 20 dBm, gamma = 2, d0 = 1 m, PL0 = 30 dB) with a
/// -100 dBm noise floor and no shadowing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub path_loss_exponent: f64,
    pub ref_distance_m: f64,
    pub ref_loss_db: f64,
    pub noise_floor_dbm: f64,
    /// Standard deviation of log-normal shadowing; 0 makes the model deterministic.
    pub shadowing_sigma_db: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            bandwidth_hz: 2.4e9,
            tx_power_dbm: 20.0,
            path_loss_exponent: 2.0,
            ref_distance_m: 1.0,
            ref_loss_db: 30.0,
            noise_floor_dbm: -100.0,
            shadowing_sigma_db: 0.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::config("channel.bandwidth_hz", "must be > 0"));
        }
        if !(self.ref_distance_m > 0.0 && self.ref_distance_m.is_finite()) {
            return Err(Error::config("channel.ref_distance_m", "must be > 0"));
        }
        if !(self.path_loss_exponent >= 0.0 && self.path_loss_exponent.is_finite()) {
            return Err(Error::config("channel.path_loss_exponent", "must be >= 0"));
        }
        if !(self.shadowing_sigma_db >= 0.0 && self.shadowing_sigma_db.is_finite()) {
            return Err(Error::config("channel.shadowing_sigma_db", "must be >= 0"));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::config("channel.tx_power_dbm", "must be finite"));
        }
        if !self.ref_loss_db.is_finite() {
            return Err(Error::config("channel.ref_loss_db", "must be finite"));
        }
        if !self.noise_floor_dbm.is_finite() {
            return Err(Error::config("channel.noise_floor_dbm", "must be finite"));
        }
        Ok(())
    }

    pub fn is_deterministic(&self) -> bool {
        self.shadowing_sigma_db == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub position: Position,
    pub beam_deg: f64,
}

impl UavState {
    pub fn new(position: Position, beam_deg: f64) -> Self {
        Self {
            position,
            beam_deg: normalize_deg(beam_deg),
        }
    }
}

/// Serialises `-inf` dBm as the string `"off"`.
mod power_dbm {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::NEG_INFINITY {
            s.serialize_str("off")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "off" => Ok(f64::NEG_INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"off\", got {s:?}"
            ))),
        }
    }
}

fn default_jammer_power() -> f64 {
    100.0
}

fn omni_pattern() -> RadiationPattern {
    RadiationPattern::omnidirectional(0.0)
}

/// A single stationary jammer. A power of `-inf` (`"off"` in JSON) disables it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Jammer {
    pub position: Position,
    #[serde(with = "power_dbm", default = "default_jammer_power")]
    pub power_dbm: f64,
    #[serde(default = "omni_pattern")]
    pub pattern: RadiationPattern,
    #[serde(default)]
    pub beam_deg: f64,
}

impl Jammer {
    pub fn omni(position: Position, power_dbm: f64) -> Self {
        Self {
            position,
            power_dbm,
            pattern: omni_pattern(),
            beam_deg: 0.0,
        }
    }

    pub fn is_off(&self) -> bool {
        self.power_dbm == f64::NEG_INFINITY
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() {
            return Err(Error::config("jammer.position", "coordinates must be finite"));
        }
        if !(self.power_dbm.is_finite() || self.is_off()) {
            return Err(Error::config("jammer.power_dbm", "must be finite or \"off\""));
        }
        if !self.beam_deg.is_finite() {
            return Err(Error::config("jammer.beam_deg", "must be finite"));
        }
        Ok(())
    }
}

/// Non-symmetric matrix of directed link capacities in bps, row = transmitter.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CapacityMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from rows; the diagonal is forced to zero.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::Domain(format!(
                        "capacity[{i}][{j}] = {c} is not finite and >= 0"
                    )));
                }
                if i != j {
                    m.entries[i * n + j] = c;
                }
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.n + to]
    }

    pub fn set(&mut self, from: usize, to: usize, capacity: f64) {
        if from != to {
            self.entries[from * self.n + to] = capacity;
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn scaled(&self, k: f64) -> CapacityMatrix {
        CapacityMatrix {
            n: self.n,
            entries: self.entries.iter().map(|c| c * k).collect(),
        }
    }
}

impl Serialize for CapacityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CapacityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        CapacityMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Log-distance path loss in dB. Distances below `d0` are clamped to `d0`.
pub fn path_loss(distance_m: f64, params: &ChannelParams, shadow_db: f64) -> Result<f64> {
    if distance_m.is_nan() || distance_m <= 0.0 {
        return Err(Error::Domain(format!("path loss needs distance > 0, got {distance_m}")));
    }
    let d = distance_m.max(params.ref_distance_m);
    Ok(params.ref_loss_db + 10.0 * params.path_loss_exponent * (d / params.ref_distance_m).log10() + shadow_db)
}

/// One zero-mean Gaussian shadowing draw in dB.
pub fn shadow_draw<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> f64 {
    if sigma_db == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma_db).expect("sigma validated >= 0").sample(rng)
}

/// Direction of `to` as seen from `from`.
pub fn bearing(from: Position, to: Position) -> Result<f64> {
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::Domain(format!("bearing between coincident points {from}")));
    }
    Ok(normalize_deg(dy.atan2(dx).to_degrees()))
}

/// Gain of an antenna pointing at `beam_deg` in the direction `target_bearing_deg`.
#[inline]
pub fn antenna_gain(pattern: &RadiationPattern, beam_deg: f64, target_bearing_deg: f64) -> f64 {
    pattern.gain_at(target_bearing_deg - beam_deg)
}

#[inline]
pub fn received_power(tx_dbm: f64, gain_tx_dbi: f64, gain_rx_dbi: f64, path_loss_db: f64) -> f64 {
    tx_dbm + gain_tx_dbi + gain_rx_dbi - path_loss_db
}

/// Signal to interference-plus-noise ratio in linear units.
pub fn sinr_linear(signal_dbm: f64, interference_dbm: &[f64], noise_floor_dbm: f64) -> f64 {
    let denom = dbm_to_mw(noise_floor_dbm) + interference_dbm.iter().map(|&p| dbm_to_mw(p)).sum::<f64>();
    dbm_to_mw(signal_dbm) / denom
}

/// Shannon capacity `B * log2(1 + sinr)` in bps.
#[inline]
pub fn link_capacity(bandwidth_hz: f64, sinr: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr).log2()
}

/// Everything about a swarm's links that does not depend on beam directions.
///
/// The optimiser evaluates many beam vectors for one set of positions, so the
/// distances, bearings and path losses are computed once here.
#[derive(Debug, Clone)]
pub struct LinkGeometry {
    n: usize,
    /// `loss[i * n + j]`: path loss from i to j in dB.
    loss: Vec<f64>,
    /// `bearing[i * n + j]`: direction of j as seen from i.
    bearing: Vec<f64>,
    jammer: Vec<JammerLink>,
    jammer_off: bool,
}

#[derive(Debug, Clone, Copy)]
struct JammerLink {
    /// Jammer power plus its transmit gain toward the UAV, dBm.
    tx_dbm: f64,
    tx_gain: f64,
    loss: f64,
    /// Direction of the jammer as seen from the UAV.
    bearing: f64,
}

impl LinkGeometry {
    /// Deterministic geometry (no shadowing draws).
    pub fn new(positions: &[Position], jammer: &Jammer, params: &ChannelParams) -> Result<Self> {
        Self::build(positions, jammer, params, |_| 0.0)
    }

    /// Geometry with one independent shadowing draw per directed link and per
    /// jammer-to-UAV path.
    pub fn with_shadowing<R: Rng + ?Sized>(
        positions: &[Position],
        jammer: &Jammer,
        params: &ChannelParams,
        rng: &mut R,
    ) -> Result<Self> {
        let sigma = params.shadowing_sigma_db;
        Self::build(positions, jammer, params, |_| shadow_draw(sigma, rng))
    }

    fn build(
        positions: &[Position],
        jammer: &Jammer,
        params: &ChannelParams,
        mut shadow: impl FnMut(()) -> f64,
    ) -> Result<Self> {
        let n = positions.len();
        let mut loss = vec![0.0; n * n];
        let mut bearings = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (positions[i], positions[j]);
                let d = a.distance(&b);
                if d == 0.0 {
                    return Err(Error::CoLocated(format!("UAV {i}"), format!("UAV {j} at {a}")));
                }
                loss[i * n + j] = path_loss(d, params, shadow(()))?;
                bearings[i * n + j] = bearing(a, b)?;
            }
        }
        let jammer_off = jammer.is_off();
        let mut jam = Vec::with_capacity(n);
        for (j, p) in positions.iter().enumerate() {
            if jammer_off {
                jam.push(JammerLink {
                    tx_dbm: f64::NEG_INFINITY,
                    tx_gain: 0.0,
                    loss: 0.0,
                    bearing: 0.0,
                });
                continue;
            }
            let d = p.distance(&jammer.position);
            if d == 0.0 {
                return Err(Error::CoLocated(format!("UAV {j}"), format!("jammer at {p}")));
            }
            let tx_gain = antenna_gain(&jammer.pattern, jammer.beam_deg, bearing(jammer.position, *p)?);
            jam.push(JammerLink {
                tx_dbm: jammer.power_dbm,
                tx_gain,
                loss: path_loss(d, params, shadow(()))?,
                bearing: bearing(*p, jammer.position)?,
            });
        }
        Ok(Self {
            n,
            loss,
            bearing: bearings,
            jammer: jam,
            jammer_off,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bearing(&self, from: usize, to: usize) -> f64 {
        self.bearing[from * self.n + to]
    }

    pub fn path_loss(&self, from: usize, to: usize) -> f64 {
        self.loss[from * self.n + to]
    }

    /// Interference power received at UAV `j` whose beam points at `beam_deg`.
    pub fn interference_dbm(&self, j: usize, pattern: &RadiationPattern, beam_deg: f64) -> f64 {
        if self.jammer_off {
            return f64::NEG_INFINITY;
        }
        let jl = &self.jammer[j];
        received_power(
            jl.tx_dbm,
            jl.tx_gain,
            antenna_gain(pattern, beam_deg, jl.bearing),
            jl.loss,
        )
    }

    /// Capacity matrix for the given beam directions (one per UAV).
    pub fn capacities(&self, beams: &[f64], pattern: &RadiationPattern, params: &ChannelParams) -> CapacityMatrix {
        assert_eq!(beams.len(), self.n, "one beam per UAV");
        let n = self.n;
        let noise_mw = dbm_to_mw(params.noise_floor_dbm);
        let mut m = CapacityMatrix::zeros(n);
        for j in 0..n {
            let denom = noise_mw + dbm_to_mw(self.interference_dbm(j, pattern, beams[j]));
            for i in 0..n {
                if i == j {
                    continue;
                }
                let k = i * n + j;
                let g_tx = antenna_gain(pattern, beams[i], self.bearing[k]);
                let g_rx = antenna_gain(pattern, beams[j], self.bearing[j * n + i]);
                let signal = received_power(params.tx_power_dbm, g_tx, g_rx, self.loss[k]);
                m.entries[k] = link_capacity(params.bandwidth_hz, dbm_to_mw(signal) / denom);
            }
        }
        m
    }
}

/// Directed link capacities of a swarm under jamming, without shadowing.
pub fn capacity_matrix(
    swarm: &[UavState],
    jammer: &Jammer,
    pattern: &RadiationPattern,
    params: &ChannelParams,
) -> Result<CapacityMatrix> {
    let positions: Vec<Position> = swarm.iter().map(|u| u.position).collect();
    let beams: Vec<f64> = swarm.iter().map(|u| u.beam_deg).collect();
    Ok(LinkGeometry::new(&positions, jammer, params)?.capacities(&beams, pattern, params))
}

/// As [`capacity_matrix`], drawing log-normal shadowing from `rng`.
pub fn capacity_matrix_shadowed<R: Rng + ?Sized>(
    swarm: &[UavState],
    jammer: &Jammer,
    pattern: &RadiationPattern,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<CapacityMatrix> {
    let positions: Vec<Position> = swarm.iter().map(|u| u.position).collect();
    let beams: Vec<f64> = swarm.iter().map(|u| u.beam_deg).collect();
    Ok(LinkGeometry::with_shadowing(&positions, jammer, params, rng)?.capacities(&beams, pattern, params))
}
