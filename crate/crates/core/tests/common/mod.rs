//! Reference implementations used as test oracles. They deliberately share no
//! code with the library: straight-line channel formulas, exhaustive simple
//! path enumeration and brute-force beam sweeps.
#![allow(dead_code)]

use uavjam::channel::{ChannelParams, Jammer, Position, RadiationPattern};

/// Gain table lookup with linear interpolation in dB and wrap-around.
pub fn gain(pattern: &RadiationPattern, relative_deg: f64) -> f64 {
    let pts: Vec<(f64, f64)> = pattern.samples().iter().map(|s| (s.angle_deg, s.gain_dbi)).collect();
    if pts.len() == 1 {
        return pts[0].1;
    }
    let mut a = relative_deg % 360.0;
    if a < 0.0 {
        a += 360.0;
    }
    if a >= 360.0 {
        a -= 360.0;
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    // bracket inside the table
    for w in pts.windows(2) {
        let ((a0, g0), (a1, g1)) = (w[0], w[1]);
        if a >= a0 && a <= a1 {
            return g0 + (g1 - g0) * (a - a0) / (a1 - a0);
        }
    }
    // wrap segment from the last sample to the first one plus a turn
    let span = first.0 + 360.0 - last.0;
    let t = if a >= last.0 { a - last.0 } else { a + 360.0 - last.0 };
    last.1 + (first.1 - last.1) * t / span
}

pub fn bearing_deg(from: Position, to: Position) -> f64 {
    let b = (to.y - from.y).atan2(to.x - from.x).to_degrees();
    if b < 0.0 {
        b + 360.0
    } else {
        b
    }
}

pub fn loss_db(from: Position, to: Position, p: &ChannelParams) -> f64 {
    let d = ((to.x - from.x).powi(2) + (to.y - from.y).powi(2)).sqrt();
    let d = if d < p.ref_distance_m { p.ref_distance_m } else { d };
    p.ref_loss_db + 10.0 * p.path_loss_exponent * (d / p.ref_distance_m).log10()
}

/// Directed capacity matrix in bps, entry `[i][j]` for the link i -> j.
pub fn capacities(
    positions: &[Position],
    beams: &[f64],
    jammer: &Jammer,
    pattern: &RadiationPattern,
    p: &ChannelParams,
) -> Vec<Vec<f64>> {
    let n = positions.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let gt = gain(pattern, bearing_deg(positions[i], positions[j]) - beams[i]);
            let gr = gain(pattern, bearing_deg(positions[j], positions[i]) - beams[j]);
            let pr_dbm = p.tx_power_dbm + gt + gr - loss_db(positions[i], positions[j], p);
            let mut denom_mw = 10f64.powf(p.noise_floor_dbm / 10.0);
            if jammer.power_dbm.is_finite() {
                let gj = gain(
                    &jammer.pattern,
                    bearing_deg(jammer.position, positions[j]) - jammer.beam_deg,
                );
                let grj = gain(pattern, bearing_deg(positions[j], jammer.position) - beams[j]);
                let pj_dbm = jammer.power_dbm + gj + grj - loss_db(jammer.position, positions[j], p);
                denom_mw += 10f64.powf(pj_dbm / 10.0);
            }
            let sinr = 10f64.powf(pr_dbm / 10.0) / denom_mw;
            out[i][j] = p.bandwidth_hz * (1.0 + sinr).log2();
        }
    }
    out
}

/// Best simple path from `s` to `t` by exhaustive enumeration: minimum sum
/// of 1/C (summed source to sink), returning `(weight, bottleneck)`.
/// Unreachable pairs give `(inf, 0)`.
pub fn best_route(m: &[Vec<f64>], s: usize, t: usize) -> (f64, f64) {
    fn walk(m: &[Vec<f64>], at: usize, t: usize, seen: &mut Vec<bool>, w: f64, neck: f64, best: &mut (f64, f64)) {
        if at == t {
            if w < best.0 {
                *best = (w, neck);
            }
            return;
        }
        for next in 0..m.len() {
            if seen[next] || m[at][next] <= 0.0 {
                continue;
            }
            seen[next] = true;
            walk(m, next, t, seen, w + 1.0 / m[at][next], neck.min(m[at][next]), best);
            seen[next] = false;
        }
    }
    let mut seen = vec![false; m.len()];
    seen[s] = true;
    let mut best = (f64::INFINITY, 0.0);
    walk(m, s, t, &mut seen, 0.0, f64::INFINITY, &mut best);
    best
}

/// `(average, minimum)` of the end-to-end rates over all ordered pairs.
pub fn e2e_summary(m: &[Vec<f64>]) -> (f64, f64) {
    let n = m.len();
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    for s in 0..n {
        for t in 0..n {
            if s != t {
                let (_, neck) = best_route(m, s, t);
                sum += neck;
                min = min.min(neck);
            }
        }
    }
    (sum / (n * (n - 1)) as f64, min)
}

pub fn objective(m: &[Vec<f64>], alpha: f64, beta: f64) -> f64 {
    let (avg, min) = e2e_summary(m);
    let term = |x: f64, e: f64| if e == 0.0 { 1.0 } else { x.powf(e) };
    term(avg, alpha) * term(min, beta)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Best objective over a 1-degree grid of beam pairs for two UAVs.
pub fn sweep_two(
    positions: &[Position; 2],
    jammer: &Jammer,
    pattern: &RadiationPattern,
    p: &ChannelParams,
) -> (f64, [f64; 2]) {
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    for a in 0..360 {
        for b in 0..360 {
            let beams = [a as f64, b as f64];
            let of = objective(&capacities(positions, &beams, jammer, pattern, p), 1.0, 1.0);
            if of > best.0 {
                best = (of, beams);
            }
        }
    }
    best
}
