//! Numerically realized polygons, each placed with its center (or base
//! midpoint) at the origin and its corners listed counter-clockwise.
//!
//! These realizations deliberately avoid the closed forms of
//! [`crate::formulas`]: every shape is found by bisection on a defining
//! geometric property (an angle or a side length) measured in the model,
//! so that the two routes can be compared.

use super::{
    angle_at, direction, dist, geodesic_step, midpoint, rotate_tangent, HPoint, Isometry, Line,
    Vec3, MAX_DISTANCE,
};
use crate::error::{infeasible, invalid, Result};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct SideGeometry {
    /// Point glued midpoint-to-midpoint.
    pub midpoint: HPoint,
    /// Unit tangent along the side, counter-clockwise around the polygon.
    pub tangent: Vec3,
    /// Unit tangent at the midpoint pointing out of the polygon.
    pub outward: Vec3,
    /// `f64::INFINITY` for sides between ideal vertices.
    pub length: f64,
    pub line: Line,
}

impl SideGeometry {
    fn finite(a: &HPoint, b: &HPoint) -> Self {
        let m = midpoint(a, b);
        let tangent = direction(&m, b);
        let r = rotate_tangent(&m, &tangent);
        SideGeometry {
            midpoint: m,
            tangent,
            outward: [-r[0], -r[1], -r[2]],
            length: dist(a, b),
            line: Line::through(a, b),
        }
    }

    fn ideal(line: Line, center: &HPoint) -> Self {
        let m = line.foot(center);
        let inward = direction(&m, center);
        let outward = [-inward[0], -inward[1], -inward[2]];
        SideGeometry {
            midpoint: m,
            tangent: rotate_tangent(&m, &outward),
            outward,
            length: f64::INFINITY,
            line,
        }
    }

    /// Isometry taking the origin frame to `(midpoint, tangent, outward)`.
    pub fn frame(&self) -> Isometry {
        Isometry::from_frame(&self.midpoint, &self.tangent, &self.outward)
    }
}

/// A convex polygon: side `k` runs from corner `k` to corner `k + 1`.
#[derive(Clone, Debug)]
pub struct PolygonGeometry {
    /// `None` marks an ideal vertex.
    pub corners: Vec<Option<HPoint>>,
    pub sides: Vec<SideGeometry>,
    /// Interior angle per corner, `0` at ideal vertices.
    pub angles: Vec<f64>,
    pub center: HPoint,
}

impl PolygonGeometry {
    fn from_corners(corners: Vec<HPoint>, center: HPoint) -> Self {
        let k = corners.len();
        let sides = (0..k)
            .map(|i| SideGeometry::finite(&corners[i], &corners[(i + 1) % k]))
            .collect();
        let angles = (0..k)
            .map(|i| {
                angle_at(
                    &corners[i],
                    &corners[(i + k - 1) % k],
                    &corners[(i + 1) % k],
                )
            })
            .collect();
        PolygonGeometry {
            corners: corners.into_iter().map(Some).collect(),
            sides,
            angles,
            center,
        }
    }

    pub fn side_count(&self) -> usize {
        self.sides.len()
    }

    /// Distance from the center to the line of side `k`.
    pub fn apothem(&self, k: usize) -> f64 {
        self.sides[k].line.distance_to(&self.center)
    }
}

/// Bisection for a decreasing function: returns `x` in `[lo, hi]` with
/// `f(x) ≈ target`.
fn bisect_decreasing(mut lo: f64, mut hi: f64, target: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The regular ideal `n`-gon. Side `k` has its midpoint in direction
/// `2πk/n`; the midpoints are the feet of the perpendiculars from the center.
pub fn ideal_regular_polygon(n: usize) -> Result<PolygonGeometry> {
    if n < 3 {
        return Err(invalid(format!("ideal polygon needs n ≥ 3, got {n}")));
    }
    let center = HPoint::origin();
    let step = 2.0 * PI / n as f64;
    let sides = (0..n)
        .map(|k| {
            let mid = k as f64 * step;
            SideGeometry::ideal(
                Line::through_ideal(mid - step / 2.0, mid + step / 2.0),
                &center,
            )
        })
        .collect();
    Ok(PolygonGeometry {
        corners: vec![None; n],
        sides,
        angles: vec![0.0; n],
        center,
    })
}

/// The right-angled `2n`-gon with an order-`n` rotational symmetry whose
/// odd sides have length `t`. Even sides (the `s` sides) have their
/// midpoints in directions `2πk/n`.
pub fn semi_regular_polygon(n: usize, t: f64) -> Result<PolygonGeometry> {
    if n < 3 {
        return Err(invalid(format!(
            "semi-regular polygon needs n ≥ 3, got {n}"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!(
            "boundary side length must be > 0, got {t}"
        )));
    }
    let half = PI / n as f64;
    let c = half.cos();
    // Right angles between consecutive sides: ⟨n_s, n_t⟩ = 0.
    let s_distance = |ht: f64| (c / ht.tanh()).atanh();
    // One corner by intersection; the rest by the mirror in the axis of
    // side 0 and rotations, so that equal sides come out equal.
    let build = |ht: f64| -> Vec<HPoint> {
        let hs = s_distance(ht);
        let corner = Line::at_distance(hs, 0.0)
            .intersect(&Line::at_distance(ht, half))
            .expect("perpendicular lines meet");
        let (rho, theta) = corner.polar();
        let mut corners = Vec::with_capacity(2 * n);
        for k in 0..n {
            let turn = 2.0 * half * k as f64;
            corners.push(HPoint::from_polar(rho, turn - theta));
            corners.push(HPoint::from_polar(rho, turn + theta));
        }
        corners
    };
    let t_length = |ht: f64| {
        let c = build(ht);
        dist(&c[1], &c[2])
    };
    let lo = c.atanh() * (1.0 + 1e-12) + 1e-12;
    let mut hi = lo + 1.0;
    while t_length(hi) > t {
        hi += 1.0;
        if hi > MAX_DISTANCE {
            return Err(infeasible(format!(
                "boundary length {t} too small to realize"
            )));
        }
    }
    if t_length(lo) < t {
        return Err(infeasible(format!(
            "boundary length {t} too large to realize"
        )));
    }
    let ht = bisect_decreasing(lo, hi, t, t_length);
    Ok(PolygonGeometry::from_corners(build(ht), HPoint::origin()))
}

/// The equilateral triangle with all angles `2π/n`, corner `k` in
/// direction `2πk/3` from the center.
pub fn equilateral_triangle(n: usize) -> Result<PolygonGeometry> {
    if n <= 6 {
        return Err(infeasible(format!(
            "angle 2π/{n} is not below π/3; no hyperbolic equilateral triangle"
        )));
    }
    let target = 2.0 * PI / n as f64;
    let corners = |rho: f64| -> Vec<HPoint> {
        (0..3)
            .map(|k| HPoint::from_polar(rho, 2.0 * PI * k as f64 / 3.0))
            .collect()
    };
    let angle = |rho: f64| {
        let c = corners(rho);
        angle_at(&c[0], &c[2], &c[1])
    };
    let mut hi = 1.0;
    while angle(hi) > target {
        hi *= 2.0;
        if hi > MAX_DISTANCE {
            return Err(infeasible(format!(
                "triangle with angle 2π/{n} out of range"
            )));
        }
    }
    let rho = bisect_decreasing(0.0, hi, target, angle);
    Ok(PolygonGeometry::from_corners(
        corners(rho),
        HPoint::origin(),
    ))
}

/// Quadrilateral with two right angles at the ends of a base, two equal
/// summit angles and a mirror symmetry swapping the legs.
#[derive(Clone, Debug)]
pub struct RightQuadrilateral {
    pub base: f64,
    pub angle: f64,
    pub leg: f64,
    pub summit: f64,
    /// From a base corner to the opposite summit corner.
    pub diagonal: f64,
    /// Corners `A, B` (right angles) and `C, D` (summit), counter-clockwise.
    pub geometry: PolygonGeometry,
}

/// Realizes the quadrilateral with base `base` between its right angles and
/// summit angles `angle` by bisection on the leg length.
pub fn saccheri_quadrilateral(base: f64, angle: f64) -> Result<RightQuadrilateral> {
    if !(base > 0.0 && base.is_finite()) {
        return Err(invalid(format!("base length must be > 0, got {base}")));
    }
    if !(angle > 0.0 && angle < PI / 2.0) {
        return Err(infeasible(format!(
            "summit angle {angle} must lie in (0, π/2) for two right angles"
        )));
    }
    let a = HPoint::from_polar(base / 2.0, PI);
    let b = HPoint::from_polar(base / 2.0, 0.0);
    let along = direction(&a, &b);
    let up_a = rotate_tangent(&a, &along);
    let back = direction(&b, &a);
    let up_b = rotate_tangent(&b, &[-back[0], -back[1], -back[2]]);
    let corners = |leg: f64| {
        let c = geodesic_step(&b, &up_b, leg);
        let d = geodesic_step(&a, &up_a, leg);
        [a, b, c, d]
    };
    // Half the quadrilateral is a Lambert quadrilateral, which gives
    // cosh(leg) = √(cos²α + sinh²(b/2)) / (sinh(b/2) sin α).
    let (sh, ca) = ((base / 2.0).sinh(), angle.cos());
    let leg = ((ca * ca + sh * sh).sqrt() / (sh * angle.sin())).acosh();
    if leg.is_nan() || leg > MAX_DISTANCE {
        return Err(infeasible(format!(
            "summit angle {angle} needs legs beyond the supported range"
        )));
    }
    let q = corners(leg);
    let center = midpoint(&midpoint(&q[0], &q[1]), &midpoint(&q[2], &q[3]));
    Ok(RightQuadrilateral {
        base,
        angle,
        leg,
        summit: dist(&q[2], &q[3]),
        diagonal: dist(&q[0], &q[2]),
        geometry: PolygonGeometry::from_corners(q.to_vec(), center),
    })
}

/// Solves the quadrilateral with two right angles, a side `t3` between them
/// and two further angles `alpha`.
pub fn solve_right_quadrilateral(t3: f64, alpha: f64) -> Result<RightQuadrilateral> {
    saccheri_quadrilateral(t3, alpha)
}
