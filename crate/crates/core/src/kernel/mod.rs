//! Numeric model of the hyperbolic plane.
//!
//! Points live on the upper sheet of the hyperboloid `x0² − x1² − x2² = 1`
//! with the Minkowski form `⟨a, b⟩ = a0 b0 − a1 b1 − a2 b2`. Geodesic lines
//! are stored by a unit spacelike normal, tangent vectors are spacelike
//! vectors orthogonal to their base point. The Poincaré disk only appears
//! as an independent distance oracle and for rendering.

mod develop;
mod polygon;

pub use develop::{develop, DevelopedChain, Gluing};
pub use polygon::{
    equilateral_triangle, ideal_regular_polygon, saccheri_quadrilateral, semi_regular_polygon,
    solve_right_quadrilateral, PolygonGeometry, RightQuadrilateral, SideGeometry,
};

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest distance the kernel accepts for constructions; `cosh` of larger
/// values loses too much relative precision in double arithmetic.
pub const MAX_DISTANCE: f64 = 50.0;

pub type Vec3 = [f64; 3];

#[inline]
pub fn minkowski(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

/// `J (a × b)`: orthogonal to both `a` and `b` for the Minkowski form.
#[inline]
pub fn minkowski_cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        -(a[2] * b[0] - a[0] * b[2]),
        -(a[0] * b[1] - a[1] * b[0]),
    ]
}

#[inline]
fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Normalizes a spacelike vector to `⟨v, v⟩ = −1`.
fn unit_spacelike(v: &Vec3) -> Vec3 {
    let n = (-minkowski(v, v)).max(0.0).sqrt();
    scale(v, 1.0 / n)
}

/// `acosh` evaluated through `log1p` so that arguments close to 1 keep
/// their relative precision.
pub fn acosh_stable(x: f64) -> f64 {
    let y = x - 1.0;
    (y + (y * (x + 1.0)).sqrt()).ln_1p()
}

/// A point of the hyperbolic plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct HPoint {
    x: Vec3,
}

impl From<HPoint> for [f64; 3] {
    fn from(p: HPoint) -> Self {
        p.x
    }
}

impl TryFrom<[f64; 3]> for HPoint {
    type Error = crate::Error;
    fn try_from(x: [f64; 3]) -> Result<Self> {
        HPoint::new(x[0], x[1], x[2])
    }
}

impl HPoint {
    /// Checks the hyperboloid constraint (up to rounding) and re-projects.
    pub fn new(x0: f64, x1: f64, x2: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && x2.is_finite()) {
            return Err(invalid("non-finite point coordinates"));
        }
        if x0 < 1.0 - 1e-9 {
            return Err(invalid(format!("x0 = {x0} is not on the upper sheet")));
        }
        let q = x0 * x0 - x1 * x1 - x2 * x2;
        if (q - 1.0).abs() > 1e-9 * x0 * x0 {
            return Err(invalid(format!("hyperboloid constraint violated: {q}")));
        }
        Ok(Self::from_spatial(x1, x2))
    }

    /// The point with the given spatial coordinates; `x0` is recomputed.
    pub fn from_spatial(x1: f64, x2: f64) -> Self {
        let x0 = (1.0 + x1 * x1 + x2 * x2).sqrt();
        HPoint { x: [x0, x1, x2] }
    }

    pub fn origin() -> Self {
        HPoint { x: [1.0, 0.0, 0.0] }
    }

    /// The point at distance `r` from the origin in direction `theta`.
    pub fn from_polar(r: f64, theta: f64) -> Self {
        let s = r.sinh();
        HPoint::from_spatial(s * theta.cos(), s * theta.sin())
    }

    /// `(distance from origin, angle)`.
    pub fn polar(&self) -> (f64, f64) {
        let s = self.x[1].hypot(self.x[2]);
        (s.asinh(), self.x[2].atan2(self.x[1]))
    }

    /// A vector already on the hyperboloid up to rounding, such as the image
    /// of a point under a Lorentz matrix. Keeps the spatial part and
    /// recomputes `x0`: rescaling by `⟨v, v⟩` would cancel catastrophically
    /// far from the origin.
    pub(crate) fn from_unit(v: &Vec3) -> Self {
        let s = if v[0] < 0.0 { -1.0 } else { 1.0 };
        HPoint::from_spatial(v[1] * s, v[2] * s)
    }

    /// Projects an arbitrary timelike vector with `x0 > 0` onto the hyperboloid.
    pub(crate) fn from_timelike(v: &Vec3) -> Self {
        let q = minkowski(v, v);
        let s = if v[0] < 0.0 { -1.0 } else { 1.0 } / q.sqrt();
        HPoint::from_spatial(v[1] * s, v[2] * s)
    }

    pub fn coords(&self) -> Vec3 {
        self.x
    }

    pub fn x0(&self) -> f64 {
        self.x[0]
    }

    /// Deviation from the hyperboloid constraint.
    pub fn constraint_error(&self) -> f64 {
        (minkowski(&self.x, &self.x) - 1.0).abs()
    }

    pub fn to_poincare(&self) -> (f64, f64) {
        let d = 1.0 + self.x[0];
        (self.x[1] / d, self.x[2] / d)
    }

    pub fn from_poincare(u: f64, v: f64) -> Result<Self> {
        let r2 = u * u + v * v;
        if !(u.is_finite() && v.is_finite()) || r2 >= 1.0 {
            return Err(invalid("point outside the open unit disk"));
        }
        let d = 1.0 - r2;
        Ok(HPoint::from_spatial(2.0 * u / d, 2.0 * v / d))
    }
}

/// Hyperbolic distance.
///
/// Small separations use `2 asinh(‖p − q‖ / 2)` with the time component of
/// the difference computed without cancellation; large ones use `acosh`.
pub fn dist(p: &HPoint, q: &HPoint) -> f64 {
    let c = minkowski(&p.x, &q.x);
    if c > 2.0 {
        return c.acosh();
    }
    let d1 = p.x[1] - q.x[1];
    let d2 = p.x[2] - q.x[2];
    let d0 = (d1 * (p.x[1] + q.x[1]) + d2 * (p.x[2] + q.x[2])) / (p.x[0] + q.x[0]);
    let n2 = (d1 * d1 + d2 * d2 - d0 * d0).max(0.0);
    2.0 * (n2.sqrt() / 2.0).asinh()
}

/// Distance computed in the Poincaré disk, independent of [`dist`].
pub fn poincare_dist(p: &HPoint, q: &HPoint) -> f64 {
    let (a, b) = p.to_poincare();
    let (c, d) = q.to_poincare();
    let num = (a - c).powi(2) + (b - d).powi(2);
    let den = (1.0 - a * a - b * b) * (1.0 - c * c - d * d);
    acosh_stable(1.0 + 2.0 * num / den)
}

/// Exponential map: the point at distance `r` from `p` in direction `theta`.
///
/// Directions at `p` are those at the origin transported by
/// [`Isometry::translation_to`], so `theta = 0` is fixed per base point.
pub fn point_at(p: &HPoint, theta: f64, r: f64) -> Result<HPoint> {
    if !(theta.is_finite() && r.is_finite()) || r < 0.0 {
        return Err(invalid(format!("point_at needs finite r ≥ 0, got {r}")));
    }
    if r > MAX_DISTANCE {
        return Err(invalid(format!("distance {r} above supported range")));
    }
    Ok(Isometry::translation_to(p).apply(&HPoint::from_polar(r, theta)))
}

/// Area of a metric ball of radius `rho`: `4π sinh²(ρ/2)`.
pub fn ball_area(rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(invalid(format!("ball radius must be ≥ 0, got {rho}")));
    }
    Ok(4.0 * PI * (rho / 2.0).sinh().powi(2))
}

/// Unit tangent vector at `p` pointing towards `q`.
pub fn direction(p: &HPoint, q: &HPoint) -> Vec3 {
    let c = minkowski(&p.x, &q.x);
    unit_spacelike(&sub(&q.x, &scale(&p.x, c)))
}

/// Rotates a tangent vector at `p` by +90° (counter-clockwise).
pub fn rotate_tangent(p: &HPoint, v: &Vec3) -> Vec3 {
    scale(&minkowski_cross(&p.x, v), -1.0)
}

/// Angle in `[0, π]` between two tangent vectors at the same point.
pub fn tangent_angle(u: &Vec3, v: &Vec3) -> f64 {
    // atan2 of sine and cosine stays accurate near 0 and π, where acos does not.
    let cos = -minkowski(u, v);
    let w = minkowski_cross(u, v);
    let sin = minkowski(&w, &w).max(0.0).sqrt();
    sin.atan2(cos)
}

/// Interior angle at `p` of the triangle `p, q, r`.
pub fn angle_at(p: &HPoint, q: &HPoint, r: &HPoint) -> f64 {
    // Measured at the origin, where tangent directions are plain spatial
    // vectors; far from it the tangent inner products cancel badly.
    let back = Isometry::translation_to(p).inverse();
    let (a, b) = (back.apply(q), back.apply(r));
    let (u, v) = ([a.x[1], a.x[2]], [b.x[1], b.x[2]]);
    (u[0] * v[1] - u[1] * v[0])
        .abs()
        .atan2(u[0] * v[0] + u[1] * v[1])
}

/// Point reached from `p` after distance `r` along the unit tangent `v`.
pub fn geodesic_step(p: &HPoint, v: &Vec3, r: f64) -> HPoint {
    HPoint::from_unit(&add(&scale(&p.x, r.cosh()), &scale(v, r.sinh())))
}

/// Midpoint of the geodesic segment `[p, q]`.
pub fn midpoint(p: &HPoint, q: &HPoint) -> HPoint {
    // |p + q| = 2 cosh(d/2), with d from the cancellation-free distance.
    let norm = 2.0 * (dist(p, q) / 2.0).cosh();
    HPoint::from_unit(&scale(&add(&p.x, &q.x), 1.0 / norm))
}

/// A complete geodesic, stored by a unit spacelike normal `n`; the line is
/// `{x : ⟨x, n⟩ = 0}` and the positive side is `⟨x, n⟩ > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    n: Vec3,
}

impl Line {
    pub fn from_normal(n: Vec3) -> Self {
        Line {
            n: unit_spacelike(&n),
        }
    }

    pub fn through(p: &HPoint, q: &HPoint) -> Self {
        Line::from_normal(minkowski_cross(&p.x, &q.x))
    }

    /// Line through two ideal points given by their boundary angles.
    pub fn through_ideal(a: f64, b: f64) -> Self {
        let u = [1.0, a.cos(), a.sin()];
        let v = [1.0, b.cos(), b.sin()];
        Line::from_normal(minkowski_cross(&u, &v))
    }

    /// The line at distance `h` from the origin whose closest point lies in
    /// direction `theta`; the origin is on its positive side.
    pub fn at_distance(h: f64, theta: f64) -> Self {
        Line {
            n: [h.sinh(), h.cosh() * theta.cos(), h.cosh() * theta.sin()],
        }
    }

    pub fn normal(&self) -> Vec3 {
        self.n
    }

    pub fn signed_offset(&self, p: &HPoint) -> f64 {
        minkowski(&p.x, &self.n).asinh()
    }

    pub fn distance_to(&self, p: &HPoint) -> f64 {
        self.signed_offset(p).abs()
    }

    pub fn foot(&self, p: &HPoint) -> HPoint {
        let s = minkowski(&p.x, &self.n);
        let norm = (1.0 + s * s).sqrt();
        HPoint::from_unit(&scale(&add(&p.x, &scale(&self.n, s)), 1.0 / norm))
    }

    pub fn intersect(&self, other: &Line) -> Option<HPoint> {
        let v = minkowski_cross(&self.n, &other.n);
        if minkowski(&v, &v) <= 0.0 {
            return None;
        }
        Some(HPoint::from_timelike(&v))
    }

    /// Angle in `[0, π/2]` between two intersecting lines.
    pub fn angle_with(&self, other: &Line) -> f64 {
        minkowski(&self.n, &other.n).abs().min(1.0).acos()
    }

    pub fn transformed(&self, g: &Isometry) -> Line {
        Line::from_normal(g.apply_vec(&self.n))
    }
}

/// An isometry of the plane as a 3×3 matrix preserving the Minkowski form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    m: [[f64; 3]; 3],
}

impl Default for Isometry {
    fn default() -> Self {
        Self::identity()
    }
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Rotation by `phi` about the origin.
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Isometry {
            m: [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        }
    }

    /// Translation by `a` along the `x1` axis.
    pub fn boost(a: f64) -> Self {
        let (ch, sh) = (a.cosh(), a.sinh());
        Isometry {
            m: [[ch, sh, 0.0], [sh, ch, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// The translation along the geodesic from the origin to `p`.
    pub fn translation_to(p: &HPoint) -> Self {
        let (r, phi) = p.polar();
        Isometry::rotation(phi)
            .compose(&Isometry::boost(r))
            .compose(&Isometry::rotation(-phi))
    }

    /// The isometry whose columns are `(point, e1, e2)`: it maps the origin
    /// frame onto the given orthonormal frame.
    pub fn from_frame(p: &HPoint, e1: &Vec3, e2: &Vec3) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i] = [p.x[i], e1[i], e2[i]];
        }
        Isometry { m }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Isometry { m }
    }

    /// `J Mᵀ J`.
    pub fn inverse(&self) -> Self {
        let sign = [1.0, -1.0, -1.0];
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = sign[i] * self.m[j][i] * sign[j];
            }
        }
        Isometry { m }
    }

    pub fn apply_vec(&self, v: &Vec3) -> Vec3 {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Applies the isometry and re-projects onto the hyperboloid.
    pub fn apply(&self, p: &HPoint) -> HPoint {
        HPoint::from_unit(&self.apply_vec(&p.x))
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn preserves_orientation(&self) -> bool {
        self.determinant() > 0.0
    }

    /// Largest entry of `Mᵀ J M − J`.
    pub fn lorentz_defect(&self) -> f64 {
        let sign = [1.0, -1.0, -1.0];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| self.m[k][i] * sign[k] * self.m[k][j]).sum();
                let target = if i == j { sign[i] } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn distance_identity_and_axis() {
        let p = HPoint::origin();
        assert_eq!(dist(&p, &p), 0.0);
        let q = HPoint::new(1f64.cosh(), 1f64.sinh(), 0.0).unwrap();
        assert!(close(dist(&p, &q), 1.0, 1e-15));
    }

    #[test]
    fn rejects_bad_points() {
        assert!(HPoint::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(HPoint::new(2.0, 0.0, 0.0).is_err());
        assert!(HPoint::new(-1.0, 0.0, 0.0).is_err());
        assert!(HPoint::from_poincare(1.0, 0.0).is_err());
    }

    #[test]
    fn point_at_zero_and_antipodes() {
        let p = HPoint::from_polar(1.3, 0.4);
        let q = point_at(&p, 2.0, 0.0).unwrap();
        assert!(dist(&p, &q) < 1e-12);
        let a = point_at(&p, 0.7, 1.5).unwrap();
        let b = point_at(&p, 0.7 + PI, 1.5).unwrap();
        assert!(close(dist(&a, &b), 3.0, 1e-10));
        assert!(point_at(&p, 0.0, -1.0).is_err());
        assert!(point_at(&p, 0.0, 51.0).is_err());
    }

    #[test]
    fn ball_area_values() {
        assert_eq!(ball_area(0.0).unwrap(), 0.0);
        let a = ball_area(2.0 * 1f64.asinh()).unwrap();
        assert!(close(a, 4.0 * PI, 1e-12));
        assert!(ball_area(-0.1).is_err());
    }

    #[test]
    fn acosh_stable_near_one() {
        let x = 1.0 + 1e-12;
        let y: f64 = x - 1.0;
        assert!(close(acosh_stable(x), (2.0 * y).sqrt(), 1e-17));
        assert!(close(acosh_stable(5.0 / 3.0), 3f64.ln(), 1e-15));
    }

    #[test]
    fn isometry_inverse_and_lorentz() {
        let g = Isometry::translation_to(&HPoint::from_polar(2.0, 1.0))
            .compose(&Isometry::rotation(0.3));
        assert!(g.lorentz_defect() < 1e-12);
        let id = g.compose(&g.inverse());
        assert!(id.lorentz_defect() < 1e-12);
        let p = HPoint::from_polar(0.5, -2.0);
        assert!(dist(&id.apply(&p), &p) < 1e-12);
        assert!(g.preserves_orientation());
    }

    #[test]
    fn lines_feet_and_angles() {
        let l = Line::at_distance(0.8, 0.3);
        assert!(close(l.distance_to(&HPoint::origin()), 0.8, 1e-14));
        let f = l.foot(&HPoint::origin());
        assert!(close(dist(&f, &HPoint::origin()), 0.8, 1e-14));
        assert!(l.distance_to(&f) < 1e-14);
        let m = Line::through(&HPoint::origin(), &f);
        assert!(close(l.angle_with(&m), PI / 2.0, 1e-12));
        let x = l.intersect(&m).unwrap();
        assert!(dist(&x, &f) < 1e-12);
    }

    #[test]
    fn rotate_tangent_is_counter_clockwise() {
        let p = HPoint::from_polar(1.1, 0.9);
        let g = Isometry::translation_to(&p);
        let east = g.apply_vec(&[0.0, 1.0, 0.0]);
        let north = g.apply_vec(&[0.0, 0.0, 1.0]);
        let r = rotate_tangent(&p, &east);
        for i in 0..3 {
            assert!(close(r[i], north[i], 1e-12));
        }
    }

    #[test]
    fn triangle_angle_sum_is_below_pi() {
        let a = HPoint::origin();
        let b = HPoint::from_polar(1.0, 0.0);
        let c = HPoint::from_polar(1.0, 1.0);
        let s = angle_at(&a, &b, &c) + angle_at(&b, &a, &c) + angle_at(&c, &a, &b);
        assert!(s < PI);
        assert!(close(angle_at(&a, &b, &c), 1.0, 1e-12));
    }
}
