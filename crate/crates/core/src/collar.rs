//! Coloring thin cylinders: each half-collar is cut into sections of
//! diameter below `d`, stacked from the boundary curve down to the geodesic.

use crate::error::{invalid, Error, Result};
use crate::formulas::{collar_geometry, convexity_threshold};
use crate::graph::{greedy_color, Graph, Ordering};
use serde::Serialize;

/// Relative gap between `d` and the target diameter `d'`.
pub const D_PRIME_GAP: f64 = 1e-6;

/// Length `ℓγ cosh ρ` of the curve at distance `ρ` from the core geodesic.
pub fn parallel_curve_length(l_gamma: f64, rho: f64) -> Result<f64> {
    if !(l_gamma > 0.0 && l_gamma.is_finite()) {
        return Err(invalid(format!(
            "geodesic length must be positive, got {l_gamma}"
        )));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(invalid(format!("ρ must be ≥ 0, got {rho}")));
    }
    Ok(l_gamma * rho.cosh())
}

/// Upper bound on the diameter of the band `ρ_bottom ≤ ρ ≤ ρ_top`: climb
/// across the band, then go half way round the longer boundary curve.
pub fn diameter_bound(l_gamma: f64, rho_top: f64, rho_bottom: f64) -> f64 {
    (rho_top - rho_bottom) + l_gamma * rho_top.cosh() / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    pub rho_top: f64,
    pub rho_bottom: f64,
    pub height: f64,
    pub diam_bound: f64,
    pub color: Option<usize>,
}

/// Sections of one half-collar, from the `ε`-thin boundary down to the
/// geodesic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectionDecomposition {
    pub l_gamma: f64,
    pub eps: f64,
    #[serde(rename = "K_C")]
    pub k_c: f64,
    pub d: f64,
    pub r0: f64,
    pub d_prime: f64,
    /// Length of the boundary curve at distance `K_C`.
    pub boundary_length: f64,
    /// Whether the boundary curve is no longer than `r0`, the sufficient
    /// condition of the original height argument.
    pub boundary_within_r0: bool,
    pub sections: Vec<Section>,
}

fn regime(msg: String) -> Error {
    Error::ParameterRegime(msg)
}

/// Cuts one half-collar into sections of diameter bound `d' = d(1 − 10⁻⁶)`.
///
/// Preconditions: `ε ≤ arcsinh(1/√2)` so half-collars are convex,
/// `0 < r0 ≤ d/2`, and the boundary curve short enough that the first
/// section is taller than `d/2`.
pub fn slice_half_collar(l_gamma: f64, eps: f64, d: f64, r0: f64) -> Result<SectionDecomposition> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(invalid(format!("d must be positive, got {d}")));
    }
    if eps > convexity_threshold() {
        return Err(regime(format!(
            "ε = {eps} > arcsinh(1/√2) = {}: half-collar convexity not guaranteed",
            convexity_threshold()
        )));
    }
    if !(r0 > 0.0 && r0 <= d / 2.0) {
        return Err(regime(format!(
            "r0 = {r0} violates 0 < r0 ≤ d/2 = {}",
            d / 2.0
        )));
    }
    let geom = collar_geometry(l_gamma, eps)?;
    let d_prime = d * (1.0 - D_PRIME_GAP);
    let boundary_length = parallel_curve_length(l_gamma, geom.k_c)?;
    if boundary_length / 2.0 >= d_prime - d / 2.0 {
        return Err(regime(format!(
            "boundary curve length {boundary_length} too long: need ℓ(γ⁺)/2 < d' − d/2 = {}",
            d_prime - d / 2.0
        )));
    }
    let mut sections = Vec::new();
    let mut top = geom.k_c;
    loop {
        let h = d_prime - l_gamma * top.cosh() / 2.0;
        let bottom = (top - h).max(0.0);
        sections.push(Section {
            rho_top: top,
            rho_bottom: bottom,
            height: top - bottom,
            diam_bound: diameter_bound(l_gamma, top, bottom),
            color: None,
        });
        if bottom == 0.0 {
            break;
        }
        top = bottom;
    }
    Ok(SectionDecomposition {
        l_gamma,
        eps,
        k_c: geom.k_c,
        d,
        r0,
        d_prime,
        boundary_length,
        boundary_within_r0: boundary_length <= r0,
        sections,
    })
}

/// Sections `a`, `b` of one half are adjacent when a distance-`d` pair may
/// exist: their `ρ` gap is at most `d` and `d` is at most the span of the
/// two bands plus half the longest curve in them.
pub fn section_graph(dec: &SectionDecomposition, d: f64) -> Graph {
    let s = &dec.sections;
    let mut g = Graph::new(s.len());
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let (hi, lo) = if s[i].rho_top >= s[j].rho_top {
                (&s[i], &s[j])
            } else {
                (&s[j], &s[i])
            };
            let gap = (hi.rho_bottom - lo.rho_top).max(0.0);
            let span = hi.rho_top - lo.rho_bottom;
            let slack = dec.l_gamma * hi.rho_top.cosh() / 2.0;
            if gap <= d && d <= span + slack {
                g.add_edge(i, j);
            }
        }
    }
    g.finish();
    g
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderColoring {
    pub upper: SectionDecomposition,
    pub lower: SectionDecomposition,
    pub max_degree: usize,
    pub colors_upper: usize,
    pub colors_lower: usize,
    pub colors_total: usize,
}

/// Colors both halves with disjoint palettes, the lower half's colors
/// following the upper half's.
pub fn color_cylinder(
    upper: &SectionDecomposition,
    lower: &SectionDecomposition,
    d: f64,
) -> CylinderColoring {
    let mut halves = [upper.clone(), lower.clone()];
    let mut counts = [0usize; 2];
    let mut max_degree = 0;
    let mut offset = 0;
    for (k, half) in halves.iter_mut().enumerate() {
        let g = section_graph(half, d);
        max_degree = max_degree.max(g.max_degree());
        let c = greedy_color(&g, Ordering::Dsatur);
        for (s, &col) in half.sections.iter_mut().zip(&c.colors) {
            s.color = Some(col + offset);
        }
        counts[k] = c.count;
        offset += c.count;
    }
    let [upper, lower] = halves;
    CylinderColoring {
        upper,
        lower,
        max_degree,
        colors_upper: counts[0],
        colors_lower: counts[1],
        colors_total: counts[0] + counts[1],
    }
}

/// Slices both halves of the collar (they are isometric) and colors them.
pub fn color_collar(l_gamma: f64, eps: f64, d: f64, r0: f64) -> Result<CylinderColoring> {
    let half = slice_half_collar(l_gamma, eps, d, r0)?;
    Ok(color_cylinder(&half, &half, d))
}

pub use crate::bounds::cylinder_budget;
