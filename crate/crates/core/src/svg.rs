//! Poincaré-disk drawings. Presentation only; nothing here is parsed back.

use crate::graph::Coloring;
use crate::kernel::{DevelopedChain, Gluing, HPoint};
use crate::net::Net;
use crate::surfaces::GluedSurface;
use std::fmt::Write;

const SIZE: f64 = 800.0;

fn to_screen(p: &HPoint) -> (f64, f64) {
    let (u, v) = p.to_poincare();
    (SIZE / 2.0 * (1.0 + u), SIZE / 2.0 * (1.0 - v))
}

fn palette(k: usize) -> String {
    // Golden-angle hues keep neighboring indices apart.
    let hue = (k as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},65%,55%)")
}

fn header(out: &mut String) {
    let half = SIZE / 2.0;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<circle cx="{half}" cy="{half}" r="{half}" fill="white" stroke="black"/>"#
    )
    .unwrap();
}

/// Net centers drawn as dots, one fill per color class.
pub fn render_net(net: &Net, coloring: &Coloring) -> String {
    let mut out = String::new();
    header(&mut out);
    for (c, &col) in net.centers.iter().zip(&coloring.colors) {
        let (x, y) = to_screen(c);
        // Euclidean size of a small disk shrinks like 1 − |z|² near the rim.
        let (u, v) = c.to_poincare();
        let r = (SIZE / 2.0 * net.r / 2.0 * (1.0 - u * u - v * v)).max(0.4);
        writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{}"/>"#,
            palette(col)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Polygon 0 and its neighbors across every glued side, drawn as geodesic
/// polygons (sides sampled along the geodesic).
pub fn render_patch(s: &GluedSurface) -> String {
    let mut out = String::new();
    header(&mut out);
    if s.polygon_count() == 0 {
        out.push_str("</svg>\n");
        return out;
    }
    let mut chains = vec![DevelopedChain::start(0)];
    for side in 0..s.geometry(0).side_count() {
        let mut c = DevelopedChain::start(0);
        if c.extend(s, side).is_ok() {
            chains.push(c);
        }
    }
    for chain in &chains {
        let k = chain.len() - 1;
        let poly = chain.last();
        let g = s.geometry(poly);
        let mut path = String::new();
        let n = g.corners.len();
        for i in 0..n {
            let side = &g.sides[i];
            let pts = sample_side(
                g.corners[i],
                g.corners[(i + 1) % n],
                &side.midpoint,
                &side.tangent,
            );
            for (j, p) in pts.iter().enumerate() {
                let (x, y) = to_screen(&chain.place(k, p));
                let cmd = if i == 0 && j == 0 { 'M' } else { 'L' };
                write!(path, "{cmd}{x:.2},{y:.2} ").unwrap();
            }
        }
        writeln!(
            out,
            r#"<path d="{path}Z" fill="{}" fill-opacity="0.35" stroke="black" stroke-width="0.8"/>"#,
            palette(poly)
        )
        .unwrap();
        let (x, y) = to_screen(&chain.place(k, &g.center));
        writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="black"/>"#
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Points along a side; ideal ends are cut off far out on the geodesic.
fn sample_side(
    a: Option<HPoint>,
    b: Option<HPoint>,
    mid: &HPoint,
    tangent: &[f64; 3],
) -> Vec<HPoint> {
    use crate::kernel::{dist, geodesic_step};
    const FAR: f64 = 8.0;
    let back = [-tangent[0], -tangent[1], -tangent[2]];
    let ta = a.map_or(FAR, |a| dist(mid, &a));
    let tb = b.map_or(FAR, |b| dist(mid, &b));
    (0..=24)
        .map(|j| {
            let s = -ta + (ta + tb) * j as f64 / 24.0;
            if s < 0.0 {
                geodesic_step(mid, &back, -s)
            } else {
                geodesic_step(mid, tangent, s)
            }
        })
        .collect()
}
