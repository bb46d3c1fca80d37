use hypchroma::formulas::*;
use hypchroma::kernel::{
    equilateral_triangle, ideal_regular_polygon, semi_regular_polygon, solve_right_quadrilateral,
    Line,
};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Side of a triangle with angles `a, b, c`, by the dual law of cosines.
fn side_from_angles(opposite: f64, b: f64, c: f64) -> f64 {
    ((opposite.cos() + b.cos() * c.cos()) / (b.sin() * c.sin())).acosh()
}

#[test]
fn collar_examples() {
    let c = collar_geometry(2.0 * asinh_one(), asinh_one()).unwrap();
    assert!((c.width - asinh_one()).abs() < 1e-12);
    assert!(c.k_c.abs() < 1e-7);
    let c = collar_geometry(1e-6, convexity_threshold()).unwrap();
    assert!((c.margin - 2f64.ln() / 2.0).abs() < 1e-4);
    let c = collar_geometry(1e-6, asinh_one()).unwrap();
    assert!(c.margin.abs() < 1e-5);
    assert!(collar_geometry(2.0, 0.1).is_err());
}

#[test]
fn ideal_distance_is_the_doubled_inradius() {
    for n in [3, 4, 5, 7, 12, 30] {
        let p = ideal_regular_polygon(n).unwrap();
        let want = ideal_clique_distance(n).unwrap();
        assert!((2.0 * p.apothem(0) - want).abs() < 1e-9, "N = {n}");
    }
    assert!((ideal_clique_distance(3).unwrap() - 3f64.ln()).abs() < 1e-12);
    assert!((ideal_clique_distance(4).unwrap() - 3f64.acosh()).abs() < 1e-12);
    let d = ideal_clique_distance(100).unwrap();
    assert!((d / (2.0 * 100f64.ln() + 2.0 * (2.0 / PI).ln()) - 1.0).abs() < 1e-3);
    assert!(ideal_clique_distance(2).is_err());
}

#[test]
fn truncated_distance_matches_semi_regular_polygon() {
    for n in [3, 4, 5, 7, 12] {
        for t in [1e-3, 0.5, 1.0, 3.0] {
            let p = semi_regular_polygon(n, t).unwrap();
            let want = truncated_clique_distance(n, t).unwrap();
            assert!((2.0 * p.apothem(0) - want).abs() < 1e-9, "N = {n}, t = {t}");
        }
    }
    let (n, t) = (5, 1.0);
    let d = truncated_clique_distance(n, t).unwrap();
    assert!(((t / 2.0).cosh() - (d / 2.0).cosh() * (PI / 5.0).sin()).abs() < 1e-12);
    assert_eq!(solve_t(5, ideal_clique_distance(5).unwrap()).unwrap(), 0.0);
    assert!(solve_t(5, 1.0).is_err());
    let back = truncated_clique_distance(5, solve_t(5, 3.0).unwrap()).unwrap();
    assert!((back - 3.0).abs() < 1e-12);
}

#[test]
fn equilateral_side_matches_law_of_cosines() {
    for n in [7, 8, 12, 20, 100] {
        let a = 2.0 * PI / n as f64;
        let want = side_from_angles(a, a, a);
        assert!(
            (equilateral_side(n).unwrap() - want).abs() < 1e-10,
            "N = {n}"
        );
        let tri = equilateral_triangle(n).unwrap();
        for s in &tri.sides {
            assert!((s.length - want).abs() < 1e-9);
        }
    }
    let l12 = equilateral_side(12).unwrap();
    assert!((l12 - (3.0 + 2.0 * 3f64.sqrt()).acosh()).abs() < 1e-12);
    assert!((l12 - 2.55337).abs() < 1e-5);
    assert!(equilateral_side(6).is_err());
    let mut last = 0.0;
    for n in 7..60 {
        let l = equilateral_side(n).unwrap();
        assert!(l > last);
        last = l;
    }
}

#[test]
fn altitude_exceeds_half_side_for_n_12() {
    let tri = equilateral_triangle(12).unwrap();
    let c = tri.corners[0].unwrap();
    let opposite = Line::through(&tri.corners[1].unwrap(), &tri.corners[2].unwrap());
    let numeric = opposite.distance_to(&c);
    assert!((numeric - equilateral_altitude(12).unwrap()).abs() < 1e-9);
    assert!(numeric > equilateral_side(12).unwrap() / 2.0);
}

#[test]
fn holed_triangle_metrics_cross_checked() {
    let t = default_hole_length();
    assert!(((t / 6.0).sinh() - 0.25).abs() < 1e-15);
    let m = holed_triangle_metrics(12, t).unwrap();
    let want = 2.0 * ((17f64.sqrt() / 4.0) / (PI / 12.0).sin()).acosh();
    assert!((m.side - want).abs() < 1e-12);
    assert!((m.side - 4.11788).abs() < 1e-5);
    assert!((m.vertex_to_hole - (4.0 * (m.side / 2.0).sinh()).acosh()).abs() < 1e-12);
    assert!(m.margin() > 0.0);
    // sinh(ℓ/2) = sinh(t/6) cosh(a).
    assert!(((m.side / 2.0).sinh() - 0.25 * m.vertex_to_hole.cosh()).abs() < 1e-10);
    // The quadrilateral cut off by the hole has summit ℓ'_12 and legs a.
    let q = solve_right_quadrilateral(t / 3.0, PI / 12.0).unwrap();
    assert!((q.summit - m.side).abs() < 1e-10);
    assert!((q.leg - m.vertex_to_hole).abs() < 1e-10);
}

#[test]
fn larger_holes_erode_the_margin() {
    // With sinh(t/6) = 1 the margin a − ℓ'/2 is negative for every N, so the
    // choice of t matters.
    let t = 6.0 * asinh_one();
    for n in [7, 12, 24, 100, 1000] {
        assert!(
            holed_triangle_metrics(n, t).unwrap().margin() <= 0.0,
            "N = {n}"
        );
        assert!(
            holed_triangle_metrics(n, default_hole_length())
                .unwrap()
                .margin()
                > 0.0
        );
    }
}

#[test]
fn degree_bound_examples() {
    let b = degree_bound(1.0, 0.4).unwrap();
    assert!((b - 1f64.sinh().powi(2) / 0.1f64.sinh().powi(2)).abs() < 1e-9);
    assert!((b - 137.6).abs() < 0.1);
    assert!(degree_bound(1.0, 0.5).is_err());
    assert!((phi(1.0).unwrap() - b).abs() < 1e-9);
}

#[test]
fn phi_branches_agree_at_the_branch_point() {
    let b = phi_branch_point();
    let small = (b.sinh() / (b / 10.0).sinh()).powi(2);
    let large = b.sinh() * b.sinh();
    assert!((small - large).abs() <= 1e-9 * large);
    assert!((phi(b).unwrap() - large).abs() <= 1e-9 * large);
    assert!((phi(b * (1.0 + 1e-12)).unwrap() - large).abs() <= 1e-6 * large);
}

#[test]
fn phi_envelope_is_exponential() {
    let ratios: Vec<f64> = (0..=100)
        .map(|i| 5.0 + 0.2 * i as f64)
        .map(|d| phi(d).unwrap() / d.exp())
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.0 && hi / lo < 1e3, "{lo} .. {hi}");
}

proptest! {
    #[test]
    fn prop_collar_invariants(l in 1e-6..4.0f64, frac in 0.0..1.0f64) {
        let lo = (l / 2.0).sinh().asinh();
        prop_assume!(lo < asinh_one());
        let eps = lo + frac * (asinh_one() - lo);
        let c = collar_geometry(l, eps).unwrap();
        let w = (1.0 / (l / 2.0).sinh()).asinh();
        let k = (eps.sinh() / (l / 2.0).sinh()).acosh();
        prop_assert!((c.width - w).abs() < 1e-12);
        prop_assert!((c.k_c - k).abs() < 1e-7 * k.max(1.0));
        prop_assert!((c.margin - (c.width - c.k_c)).abs() < 1e-12);
        if eps < asinh_one() * (1.0 - 1e-9) {
            prop_assert!(c.margin > 0.0);
        }
    }

    #[test]
    fn prop_solve_t_inverts(n in 3usize..40, t in 0.0..8.0f64) {
        let d = truncated_clique_distance(n, t).unwrap();
        let back = solve_t(n, d).unwrap();
        // d is only known to rounding, and dt/dd blows up as t → 0.
        let slope = ((d / 2.0).sinh() / (t / 2.0).sinh().max(1e-300)).min(1e8);
        prop_assert!((back - t).abs() < 1e-12 * slope.max(1.0) * d.max(1.0), "t = {t}, back = {back}");
        prop_assert!(truncated_clique_distance(n, t + 0.1).unwrap() > d);
    }

    #[test]
    fn prop_ideal_distance_increasing(n in 3usize..500) {
        prop_assert!(ideal_clique_distance(n + 1).unwrap() > ideal_clique_distance(n).unwrap());
        let d = ideal_clique_distance(n).unwrap();
        prop_assert!((truncated_clique_distance(n, 0.0).unwrap() - d).abs() <= 1e-12 * d);
    }

    #[test]
    fn prop_sinh_square_difference(a in 0.0..10.0f64, b in 0.0..10.0f64) {
        prop_assume!(a > b);
        let lhs = a.sinh().powi(2) - b.sinh().powi(2);
        let rhs = (a + b).sinh() * (a - b).sinh();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn prop_degree_bound_product_form(d in 0.05..15.0f64, frac in 0.01..1.0f64) {
        let r0 = frac * 2.0 * d / 5.0;
        let b = degree_bound(d, r0).unwrap();
        prop_assert!((b - degree_bound_annulus(d, r0)).abs() <= 1e-9 * b);
        prop_assert!(degree_bound(d * 1.1, r0).unwrap() > b);
    }

    #[test]
    fn prop_phi_covers_the_degree_bound(d in 0.05..(2.5 * 1f64.asinh())) {
        let exact = degree_bound(d, 2.0 * d / 5.0).unwrap();
        prop_assert!((phi(d).unwrap() - exact).abs() <= 1e-9 * exact);
    }
}
