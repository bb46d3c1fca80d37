use hypchroma::formulas::{default_hole_length, holed_triangle_metrics, ideal_clique_distance};
use hypchroma::kernel::{
    ball_area, develop, dist, poincare_dist, point_at, saccheri_quadrilateral,
    solve_right_quadrilateral, HPoint, Isometry, MAX_DISTANCE,
};
use hypchroma::surfaces::build_ideal_surface;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Independent distance in the Poincaré disk: `2 artanh |(z − w)/(1 − z̄w)|`.
fn disk_distance(p: &HPoint, q: &HPoint) -> f64 {
    let (a, b) = p.to_poincare();
    let (c, d) = q.to_poincare();
    let (nr, ni) = (a - c, b - d);
    // 1 − conj(z) w with z = a + ib, w = c + id.
    let (dr, di) = (1.0 - (a * c + b * d), -(a * d - b * c));
    let m = (nr * nr + ni * ni).sqrt() / (dr * dr + di * di).sqrt();
    2.0 * m.atanh()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

fn point() -> impl Strategy<Value = HPoint> {
    (0.0..4.0f64, 0.0..(2.0 * PI)).prop_map(|(r, t)| HPoint::from_polar(r, t))
}

#[test]
fn distance_along_an_axis() {
    let q = HPoint::new(1f64.cosh(), 1f64.sinh(), 0.0).unwrap();
    assert!((dist(&HPoint::origin(), &q) - 1.0).abs() < 1e-15);
    assert_eq!(dist(&q, &q), 0.0);
}

#[test]
fn non_finite_points_are_rejected() {
    assert!(HPoint::new(f64::NAN, 0.0, 0.0).is_err());
    assert!(HPoint::new(2.0, 0.0, 0.0).is_err());
}

#[test]
fn ball_area_values() {
    assert_eq!(ball_area(0.0).unwrap(), 0.0);
    assert!((ball_area(2.0 * 1f64.asinh()).unwrap() - 4.0 * PI).abs() < 1e-12);
    assert!(ball_area(-1.0).is_err());
    for rho in [0.5, 2.0, 5.0, 10.0] {
        let quad = simpson(|r| 2.0 * PI * r.sinh(), 0.0, rho, 20_000);
        let got = ball_area(rho).unwrap();
        assert!(
            (got - quad).abs() <= 1e-9 * quad.max(1.0),
            "ρ = {rho}: {got} vs {quad}"
        );
    }
}

#[test]
fn point_at_basics() {
    let p = HPoint::from_polar(1.3, 0.4);
    assert!(dist(&point_at(&p, 1.0, 0.0).unwrap(), &p) < 1e-12);
    let a = point_at(&p, 0.3, 2.0).unwrap();
    let b = point_at(&p, 0.3 + PI, 2.0).unwrap();
    assert!((dist(&a, &b) - 4.0).abs() < 1e-9);
}

#[test]
fn distances_beyond_the_supported_range_are_refused() {
    assert!(point_at(&HPoint::origin(), 0.0, MAX_DISTANCE + 1.0).is_err());
}

/// The Saccheri quadrilateral re-solved by the law of cosines: the right
/// angle at a base corner and the summit angle split by the diagonal.
fn resolve_angles(base: f64, leg: f64, summit: f64, diagonal: f64) -> (f64, f64) {
    let pythagoras = diagonal.cosh() - base.cosh() * leg.cosh();
    let angle = |opp: f64, x: f64, y: f64| {
        ((x.cosh() * y.cosh() - opp.cosh()) / (x.sinh() * y.sinh())).acos()
    };
    let summit_angle = angle(base, leg, diagonal) + angle(leg, diagonal, summit);
    (pythagoras, summit_angle)
}

#[test]
fn quadrilateral_side_matches_holed_triangle_side() {
    let t = default_hole_length();
    let q = solve_right_quadrilateral(t / 3.0, PI / 12.0).unwrap();
    let m = holed_triangle_metrics(12, t).unwrap();
    assert!(
        (q.summit - m.side).abs() < 1e-10,
        "{} vs {}",
        q.summit,
        m.side
    );
    assert!((q.leg - m.vertex_to_hole).abs() < 1e-10);
}

#[test]
fn quadrilateral_degenerates_monotonically() {
    // With the summit angle fixed, a shorter base needs longer legs.
    let mut last = 0.0;
    for k in 1..8 {
        let base = 2f64.powi(-k);
        let q = saccheri_quadrilateral(base, PI / 5.0).unwrap();
        assert!(q.leg > last, "legs should grow as the base shrinks");
        last = q.leg;
    }
    assert!(solve_right_quadrilateral(1.0, PI / 2.0).is_err());
}

#[test]
fn ideal_triangles_develop_to_ln_3() {
    let s = build_ideal_surface(3, None).unwrap();
    let chain = develop(&s, 0, &[(0, 0)]).unwrap();
    let g = |i: usize| hypchroma::kernel::Gluing::geometry(&s, i).center;
    let d = dist(&g(0), &chain.place(1, &g(chain.last())));
    assert!((d - 3f64.ln()).abs() < 1e-9);
    assert!((d - ideal_clique_distance(3).unwrap()).abs() < 1e-12);
    assert!(develop(&s, 0, &[(1, 0)]).is_err());
    assert_eq!(develop(&s, 2, &[]).unwrap().len(), 1);
}

proptest! {
    #[test]
    fn prop_distance_matches_disk_model(p in point(), q in point()) {
        let a = dist(&p, &q);
        prop_assert!((a - disk_distance(&p, &q)).abs() < 1e-9 * a.max(1.0));
        prop_assert!((a - poincare_dist(&p, &q)).abs() < 1e-9 * a.max(1.0));
        prop_assert_eq!(a, dist(&q, &p));
    }

    #[test]
    fn prop_triangle_inequality(p in point(), q in point(), r in point()) {
        prop_assert!(dist(&p, &r) <= dist(&p, &q) + dist(&q, &r) + 1e-12);
    }

    #[test]
    fn prop_point_at_round_trip(p in point(), theta in 0.0..(2.0 * PI), r in 0.0..20.0f64) {
        let q = point_at(&p, theta, r).unwrap();
        prop_assert!((dist(&p, &q) - r).abs() < 1e-10 * r.max(1.0));
        prop_assert!(q.constraint_error() < 1e-12 * q.x0() * q.x0());
    }

    #[test]
    fn prop_ball_area_increasing(a in 0.0..10.0f64, b in 0.0..10.0f64) {
        prop_assume!(a < b);
        prop_assert!(ball_area(a).unwrap() < ball_area(b).unwrap());
    }

    #[test]
    fn prop_isometries_preserve_distance(p in point(), q in point(), phi in 0.0..6.3f64, s in -3.0..3.0f64) {
        let g = Isometry::rotation(phi).compose(&Isometry::boost(s));
        prop_assert!((dist(&g.apply(&p), &g.apply(&q)) - dist(&p, &q)).abs() < 1e-9);
        prop_assert!(g.preserves_orientation());
    }

    #[test]
    fn prop_quadrilateral_round_trip(base in 0.05..3.0f64, angle in 0.05..1.5f64) {
        let q = saccheri_quadrilateral(base, angle).unwrap();
        let (pythagoras, summit_angle) = resolve_angles(q.base, q.leg, q.summit, q.diagonal);
        prop_assert!(pythagoras.abs() < 1e-10 * q.diagonal.cosh());
        prop_assert!((summit_angle - angle).abs() < 1e-10);
        for (got, want) in q.geometry.angles.iter().zip([PI / 2.0, PI / 2.0, angle, angle]) {
            prop_assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn prop_development_is_isometric(phi in 0.0..6.3f64, s in -2.0..2.0f64, side in 0usize..4) {
        // Prepending a global isometry leaves developed distances unchanged.
        let surf = build_ideal_surface(4, None).unwrap();
        let chain = develop(&surf, 0, &[(0, side)]).unwrap();
        let c = |i: usize| hypchroma::kernel::Gluing::geometry(&surf, i).center;
        let a = c(0);
        let b = chain.place(1, &c(chain.last()));
        let g = Isometry::rotation(phi).compose(&Isometry::boost(s));
        prop_assert!((dist(&g.apply(&a), &g.apply(&b)) - dist(&a, &b)).abs() < 1e-9);
        prop_assert!(chain.seam_error(&surf) < 1e-10);
    }
}
