//! Closed-form hyperbolic trigonometry used by the bounds and constructions.
//!
//! Every function validates its domain and reports
//! [`Error::GeometryInfeasible`](crate::Error::GeometryInfeasible) when the
//! requested configuration does not exist.

use crate::error::{infeasible, invalid, Result};
use crate::kernel::acosh_stable;
use serde::Serialize;
use std::f64::consts::PI;

/// `arcsinh(1)`: the collar threshold.
pub fn asinh_one() -> f64 {
    1f64.asinh()
}

/// `arcsinh(1/√2)`: the half-collar convexity threshold.
pub fn convexity_threshold() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2.asinh()
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be a positive finite length, got {x}"
        )))
    }
}

/// Geometry of the thin cylinder around a closed geodesic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CollarGeometry {
    pub l_gamma: f64,
    pub eps: f64,
    /// Collar width `arcsinh(1 / sinh(ℓ/2))`.
    pub width: f64,
    /// Distance from the geodesic to the curves of injectivity radius `ε`.
    pub k_c: f64,
    pub margin: f64,
}

/// Collar width and the distance `K_C` to the `ε`-thin boundary curves.
pub fn collar_geometry(l_gamma: f64, eps: f64) -> Result<CollarGeometry> {
    check_positive("geodesic length", l_gamma)?;
    check_positive("thinness ε", eps)?;
    if eps > asinh_one() {
        return Err(invalid(format!(
            "ε = {eps} exceeds arcsinh(1); the thin part need not be a cylinder"
        )));
    }
    let sh = (l_gamma / 2.0).sinh();
    let ratio = eps.sinh() / sh;
    if ratio < 1.0 {
        return Err(infeasible(format!(
            "sinh ε < sinh(ℓ/2) for ε = {eps}, ℓ = {l_gamma}: the geodesic is not ε-thin"
        )));
    }
    let width = (1.0 / sh).asinh();
    let k_c = acosh_stable(ratio);
    Ok(CollarGeometry {
        l_gamma,
        eps,
        width,
        k_c,
        margin: width - k_c,
    })
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(invalid(format!("N must be ≥ {min}, got {n}")))
    } else {
        Ok(())
    }
}

/// Distance between the centers of two regular ideal `n`-gons glued along a
/// side: twice the inradius, `arccosh(2 / sin²(π/n) − 1)`.
pub fn ideal_clique_distance(n: usize) -> Result<f64> {
    check_n(n, 3)?;
    let s = (PI / n as f64).sin();
    Ok(acosh_stable(2.0 / (s * s) - 1.0))
}

/// Center distance for semi-regular right-angled `2n`-gons with boundary
/// sides of length `t`: `cosh(t/2) = cosh(d/2) sin(π/n)`.
pub fn truncated_clique_distance(n: usize, t: f64) -> Result<f64> {
    check_n(n, 3)?;
    if t.is_nan() || t < 0.0 || t.is_infinite() {
        return Err(invalid(format!("t must be ≥ 0, got {t}")));
    }
    let s = (PI / n as f64).sin();
    Ok(2.0 * acosh_stable((t / 2.0).cosh() / s))
}

/// Inverse of [`truncated_clique_distance`] in `t`.
pub fn solve_t(n: usize, d: f64) -> Result<f64> {
    check_n(n, 3)?;
    if !d.is_finite() {
        return Err(invalid("d must be finite"));
    }
    let dn = ideal_clique_distance(n)?;
    let arg = (d / 2.0).cosh() * (PI / n as f64).sin();
    if arg < 1.0 {
        // Rounding at d = d_N itself.
        if d >= dn * (1.0 - 1e-14) {
            return Ok(0.0);
        }
        return Err(infeasible(format!(
            "d = {d} is below d_{n} = {dn}; no truncation realizes it"
        )));
    }
    Ok(2.0 * acosh_stable(arg))
}

/// Side of the equilateral triangle with all angles `2π/n`.
pub fn equilateral_side(n: usize) -> Result<f64> {
    if n <= 6 {
        return Err(infeasible(format!(
            "angles 2π/{n} ≥ π/3: equilateral triangle is Euclidean or spherical"
        )));
    }
    let a = 2.0 * PI / n as f64;
    let (s, c) = a.sin_cos();
    Ok(acosh_stable((c * c + c) / (s * s)))
}

/// Distance from a vertex of the equilateral triangle with angles `2π/n` to
/// the opposite side (its altitude).
pub fn equilateral_altitude(n: usize) -> Result<f64> {
    let l = equilateral_side(n)?;
    let a = 2.0 * PI / n as f64;
    // Half of the triangle: hypotenuse ℓ, angle a at the base vertex.
    Ok((l.sinh() * a.sin()).asinh())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HoledTriangleMetrics {
    /// Side length `ℓ'_N` of the one-holed triangle.
    pub side: f64,
    /// Distance `a` from a vertex to the hole.
    pub vertex_to_hole: f64,
}

impl HoledTriangleMetrics {
    /// `a − ℓ'/2`; positive when paths through the hole are long enough.
    pub fn margin(&self) -> f64 {
        self.vertex_to_hole - self.side / 2.0
    }
}

/// Side length and vertex-to-hole distance of the one-holed triangle with
/// angles `2π/n` and a boundary geodesic of length `t`.
pub fn holed_triangle_metrics(n: usize, t: f64) -> Result<HoledTriangleMetrics> {
    if n < 7 {
        return Err(infeasible(format!(
            "one-holed triangles need N ≥ 7, got {n}"
        )));
    }
    check_positive("hole length t", t)?;
    let s6 = (t / 6.0).sinh();
    let side = 2.0 * acosh_stable((t / 6.0).cosh() / (PI / n as f64).sin());
    let ratio = (side / 2.0).sinh() / s6;
    if ratio < 1.0 {
        return Err(infeasible(format!(
            "vertex-to-hole distance undefined for N = {n}, t = {t}"
        )));
    }
    Ok(HoledTriangleMetrics {
        side,
        vertex_to_hole: acosh_stable(ratio),
    })
}

/// The hole length fixed by `sinh(t/6) = 1/4`.
pub fn default_hole_length() -> f64 {
    6.0 * 0.25f64.asinh()
}

/// Bound on the degree of the net distance graph:
/// `sinh(5r₀/2) sinh(d) / sinh²(r₀/4)`.
pub fn degree_bound(d: f64, r0: f64) -> Result<f64> {
    check_positive("d", d)?;
    check_positive("r0", r0)?;
    if r0 > 2.0 * d / 5.0 * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "r0 = {r0} exceeds 2d/5 = {}",
            2.0 * d / 5.0
        )));
    }
    Ok((2.5 * r0).sinh() * d.sinh() / (r0 / 4.0).sinh().powi(2))
}

/// The same bound written as an annulus area ratio.
pub fn degree_bound_annulus(d: f64, r0: f64) -> f64 {
    let outer = ((d + 2.5 * r0) / 2.0).sinh().powi(2);
    let inner = ((d - 2.5 * r0) / 2.0).sinh().powi(2);
    (outer - inner) / (r0 / 4.0).sinh().powi(2)
}

/// The ball radius `min(2d/5, arcsinh 1)` used for the net coloring.
pub fn net_radius(d: f64) -> f64 {
    (2.0 * d / 5.0).min(asinh_one())
}

/// Branch point `10 arcsinh(1)` of [`phi`].
pub fn phi_branch_point() -> f64 {
    10.0 * asinh_one()
}

/// The piecewise degree bound as printed:
/// `sinh²(d)/sinh²(d/10)` up to `10 arcsinh 1`, then
/// `sinh(10 arcsinh 1) sinh(d)`.
pub fn phi(d: f64) -> Result<f64> {
    check_positive("d", d)?;
    let b = phi_branch_point();
    if d <= b {
        Ok((d.sinh() / (d / 10.0).sinh()).powi(2))
    } else {
        Ok(b.sinh() * d.sinh())
    }
}

/// The degree bound evaluated at the ball radius actually used,
/// `degree_bound(d, min(2d/5, arcsinh 1))`.
pub fn phi_consistent(d: f64) -> Result<f64> {
    degree_bound(d, net_radius(d))
}
