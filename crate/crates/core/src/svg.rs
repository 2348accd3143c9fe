//! Static SVG rendering of a topology snapshot: deployment grid, jammer,
//! UAVs with beam arrows and the links used by the routing.

use std::fmt::Write;

use crate::channel::Position;
use crate::scenario::Snapshot;

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;
const ARROW_M: f64 = 6.0;

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[Position]) -> Self {
        let (mut min_x, mut max_x, mut min_y, mut max_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in points {
            min_x = min_x.min(p.x);
            max_x = max_x.max(p.x);
            min_y = min_y.min(p.y);
            max_y = max_y.max(p.y);
        }
        let pad = 5.0;
        let span = (max_x - min_x).max(max_y - min_y).max(1.0) + 2.0 * pad;
        Self {
            min_x: min_x - pad,
            max_y: max_y + pad,
            scale: (CANVAS - 2.0 * MARGIN) / span,
        }
    }

    // y grows upward in world space, downward in SVG space
    fn map(&self, p: Position) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min_x) * self.scale,
            MARGIN + (self.max_y - p.y) * self.scale,
        )
    }
}

/// Renders `snapshot` as a self-contained SVG document.
pub fn render(snapshot: &Snapshot, title: &str) -> String {
    let grid = &snapshot.grid;
    let corner = grid.origin.translated(grid.width, grid.height);
    let mut anchors = vec![grid.origin, corner];
    anchors.extend(snapshot.uavs.iter().map(|u| u.position));
    if !snapshot.jammer.is_off() {
        anchors.push(snapshot.jammer.position);
    }
    let f = Frame::fit(&anchors);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="20">{}</text>"#, escape(title));

    let (x0, y0) = f.map(Position::new(grid.origin.x, corner.y));
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="#f4f7fb" stroke="#8899aa"/>"##,
        grid.width * f.scale,
        grid.height * f.scale
    );
    for cell in grid.cells() {
        let (x, y) = f.map(grid.position(cell));
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="#b0bccb"/>"##);
    }

    let n = snapshot.uavs.len();
    let mut used = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            for hop in snapshot.routing.path(i, j).windows(2) {
                used[hop[0] * n + hop[1]] = true;
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if used[i * n + j] || used[j * n + i] {
                let (ax, ay) = f.map(snapshot.uavs[i].position);
                let (bx, by) = f.map(snapshot.uavs[j].position);
                let _ = writeln!(
                    out,
                    r##"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="#4a90d9" stroke-width="1.5" stroke-dasharray="4 3"/>"##
                );
            }
        }
    }

    if !snapshot.jammer.is_off() {
        let (x, y) = f.map(snapshot.jammer.position);
        let _ = writeln!(
            out,
            r##"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="#d0021b"/>"##,
            x,
            y - 9.0,
            x - 8.0,
            y + 6.0,
            x + 8.0,
            y + 6.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">jammer {:.0} dBm</text>"#,
            x + 10.0,
            y + 4.0,
            snapshot.jammer.power_dbm
        );
    }

    for (k, u) in snapshot.uavs.iter().enumerate() {
        let (x, y) = f.map(u.position);
        let rad = u.beam_deg.to_radians();
        let tip = u.position.translated(ARROW_M * rad.cos(), ARROW_M * rad.sin());
        let (tx, ty) = f.map(tip);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{y:.2}" x2="{tx:.2}" y2="{ty:.2}" stroke="#1b5e20" stroke-width="2.5"/>"##
        );
        let _ = writeln!(out, r##"<circle cx="{tx:.2}" cy="{ty:.2}" r="2.5" fill="#1b5e20"/>"##);
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="#2e7d32" stroke="black"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">U{k} {:.0}&#176;</text>"#,
            x + 8.0,
            y - 8.0,
            u.beam_deg
        );
    }

    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{:.0}">OF {:.4e}   avg {:.4e} bps   min {:.4e} bps</text>"#,
        CANVAS - 12.0,
        snapshot.of,
        snapshot.e2e_avg,
        snapshot.e2e_min
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::GridCell;
    use crate::optimizer::{Chromosome, Gene};
    use crate::scenario::{ScenarioConfig, ScenarioKind};

    #[test]
    fn frame_flips_y() {
        let f = Frame::fit(&[Position::new(0.0, 0.0), Position::new(50.0, 40.0)]);
        let (_, y_low) = f.map(Position::new(0.0, 0.0));
        let (_, y_high) = f.map(Position::new(0.0, 40.0));
        assert!(y_high < y_low);
        let (x, _) = f.map(Position::new(-5.0, 0.0));
        assert!((x - MARGIN).abs() < 1e-9);
    }

    #[test]
    fn render_has_every_element() {
        let env = ScenarioConfig::new(ScenarioKind::FixedArea).env();
        let best = Chromosome::new(
            [(1, 1), (4, 6), (7, 2)]
                .iter()
                .map(|&(c, r)| Gene::new(GridCell::new(c, r), 45.0))
                .collect(),
        );
        let env = crate::optimizer::SwarmEnv { n_uav: 3, ..env };
        let snap = Snapshot::build(&env, &best, 0, 0).unwrap();
        let svg = render(&snap, "a<b");
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a&lt;b"));
        assert_eq!(svg.matches(r#"r="1.5""#).count(), 99);
        assert_eq!(svg.matches(r#"r="6""#).count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 1);
    }
}
