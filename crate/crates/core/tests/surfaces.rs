use hypchroma::bounds::{lower_bound_in_d, min_closed_genus, triangle_count};
use hypchroma::error::Error;
use hypchroma::formulas::{
    default_hole_length, equilateral_side, holed_triangle_metrics, ideal_clique_distance,
    truncated_clique_distance,
};
use hypchroma::kernel::{dist, DevelopedChain, Gluing};
use hypchroma::rotation::{k4, k7, RotationSystem};
use hypchroma::surfaces::*;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::path::Path;

fn k12() -> RotationSystem {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/k12.rot");
    RotationSystem::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Center distances across every glued side, by development.
fn neighbor_distances(s: &GluedSurface) -> Vec<f64> {
    let mut out = Vec::new();
    for p in 0..s.polygon_count() {
        for side in 0..s.geometry(p).side_count() {
            if s.partner(p, side).is_none() {
                continue;
            }
            let mut chain = DevelopedChain::start(p);
            chain.extend(s, side).unwrap();
            let there = chain.place(1, &s.geometry(chain.last()).center);
            out.push(dist(&s.geometry(p).center, &there));
        }
    }
    out
}

fn assert_paired_lengths_equal(s: &GluedSurface) {
    for pr in s.pairings() {
        let a = s.geometry(pr.a.0).sides[pr.a.1].length;
        let b = s.geometry(pr.b.0).sides[pr.b.1].length;
        if a.is_finite() || b.is_finite() {
            assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                "{pr:?}: {a} vs {b}"
            );
        }
    }
}

fn certified(s: &GluedSurface) -> CliqueCertificate {
    let c = certify_clique(s, 4);
    assert_eq!(
        c.status,
        CertificateStatus::Certified,
        "{}: {c:?}",
        s.construction
    );
    assert!(c.margin.unwrap() > 0.0);
    c
}

#[test]
fn ideal_surfaces() {
    let s = build_ideal_surface(3, None).unwrap();
    assert_eq!((s.polygons().len(), s.pairings().len()), (4, 6));
    for n in [3, 4, 5, 7] {
        let s = build_ideal_surface(n, None).unwrap();
        let d = ideal_clique_distance(n).unwrap();
        assert_eq!(s.clique_size(), n + 1);
        for x in neighbor_distances(&s) {
            assert!((x - d).abs() < 1e-9, "N = {n}: {x} vs {d}");
        }
        assert_paired_lengths_equal(&s);
        let e = s.euler();
        assert!(e.connected && e.orientable);
        assert!(e.cusps + e.boundaries > 0);
    }
    let s = build_ideal_surface(3, None).unwrap();
    let c = certified(&s);
    assert!((c.edge_length - 3f64.ln()).abs() < 1e-9);
}

#[test]
fn two_shared_sides_break_the_rule() {
    let mut p = canonical_pairing(4, 1);
    let first = p[0];
    // Reroute the second pairing of polygon 0 into polygon 1 again.
    p[1] = Pairing::new((0, 1), (first.b.0, 3));
    assert!(matches!(
        build_ideal_surface(4, Some(p)),
        Err(Error::ConstructionRule(_))
    ));
}

#[test]
fn truncated_surfaces() {
    for t in [0.1, 1.0] {
        let s = build_truncated_surface(5, t, None).unwrap();
        let d = truncated_clique_distance(5, t).unwrap();
        for x in neighbor_distances(&s) {
            assert!((x - d).abs() < 1e-9);
        }
        assert_paired_lengths_equal(&s);
        assert_eq!(s.boundary_kind(), BoundaryKind::Funnel);
        certified(&s);
    }
    let s = build_truncated_surface(5, 1e-4, None).unwrap();
    let d5 = ideal_clique_distance(5).unwrap();
    for x in neighbor_distances(&s) {
        assert!((x - d5).abs() < 1e-6);
    }
}

#[test]
fn truncation_realizes_a_prescribed_distance() {
    let l = lower_bound_in_d(3.0).unwrap();
    let s = build_truncated_surface(l.n as usize, l.t_d, None).unwrap();
    for x in neighbor_distances(&s) {
        assert!((x - 3.0).abs() < 1e-9, "{x}");
    }
    assert_eq!(s.clique_size() as u64, l.polygons);
}

#[test]
fn non_orientable_truncated_pairing_is_rejected() {
    let mut p = canonical_pairing(5, 2);
    p[0].twisted = true;
    assert!(matches!(
        build_truncated_surface(5, 1.0, Some(p)),
        Err(Error::Orientability(_))
    ));
}

#[test]
fn equilateral_k12_surface() {
    let s = build_triangle_surface(&k12(), TriangleMode::Equilateral).unwrap();
    // Every vertex of K12 has degree 11, so the angles are 2π/11.
    let l11 = equilateral_side(11).unwrap();
    assert!((s.edge_length() - l11).abs() < 1e-12);
    for g in (0..s.polygon_count()).map(|p| s.geometry(p)) {
        for side in &g.sides {
            assert!((side.length - l11).abs() < 1e-9);
        }
    }
    let sums = s.vertex_angle_sums();
    assert_eq!(sums.len(), 12);
    for a in sums {
        assert!((a - 2.0 * PI).abs() < 1e-9, "{a}");
    }
    let e = s.euler();
    assert_eq!((e.v, e.e, e.f, e.genus), (12, 66, 44, Some(6)));
    assert_paired_lengths_equal(&s);
    certified(&s);
}

#[test]
fn flat_blueprints_report_their_genus() {
    let err = build_triangle_surface(&k7(), TriangleMode::Equilateral).unwrap_err();
    assert_eq!(
        err,
        Error::FlatBlueprint {
            degree: 6,
            genus: 1
        }
    );
    assert!(build_triangle_surface(&k4(), TriangleMode::Equilateral).is_err());
    let square = RotationSystem::new(vec![vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]]).unwrap();
    assert!(matches!(
        build_triangle_surface(&square, TriangleMode::Equilateral),
        Err(Error::Blueprint(_))
    ));
}

#[test]
fn holed_block_and_its_closures() {
    let rs = k12();
    let f = build_triangle_surface(&rs, TriangleMode::holed_default()).unwrap();
    let e = f.euler();
    assert_eq!(e.boundaries, 44);
    assert_eq!(e.boundaries as i64, triangle_count(11).unwrap());
    assert_eq!(e.genus, Some(6));
    let m = holed_triangle_metrics(11, default_hole_length()).unwrap();
    assert!((f.edge_length() - m.side).abs() < 1e-12);
    for b in f.descriptor().boundaries {
        assert!((b.length - default_hole_length()).abs() < 1e-9);
    }
    assert_paired_lengths_equal(&f);
    certified(&f);

    let closed = close_surface(&f, 0).unwrap();
    let ce = closed.euler();
    assert_eq!((ce.boundaries, ce.genus), (0, Some(28)));
    assert_eq!(ce.genus, Some(min_closed_genus(11).unwrap()));
    assert_paired_lengths_equal(&closed);
    certified(&closed);
    let more = close_surface(&f, 5).unwrap();
    assert_eq!(more.euler().genus, Some(33));
}

#[test]
fn closing_needs_even_boundaries_or_a_patch() {
    let s = build_ideal_surface(3, None).unwrap();
    // Every side is already paired; only cusps remain.
    assert_eq!(close_surface(&s, 0).unwrap().euler(), s.euler());
    assert!(matches!(close_surface(&s, 2), Err(Error::Pairing(_))));
    let t = build_truncated_surface(5, 1.0, None).unwrap();
    assert!(matches!(close_surface(&t, 0), Err(Error::Pairing(_))));
    assert!(close_surface(&t, -1).is_err());
}

#[test]
fn chains() {
    let empty = build_infinite_chain(&[], 3, default_hole_length()).unwrap();
    assert!(empty.surface.is_none());
    assert_eq!(empty.lower_bound, 0);

    let one = [ChainBlock {
        n: 11,
        system: Some(k12()),
    }];
    let c = build_infinite_chain(&one, 1, default_hole_length()).unwrap();
    let single = build_triangle_surface(&k12(), TriangleMode::holed_default()).unwrap();
    assert_eq!(c.lower_bound, single.clique_size());
    assert_eq!(c.lower_bound, 12);

    let blocks = [
        ChainBlock {
            n: 3,
            system: Some(k4()),
        },
        ChainBlock {
            n: 6,
            system: Some(k7()),
        },
        ChainBlock {
            n: 11,
            system: Some(k12()),
        },
        ChainBlock {
            n: 11,
            system: Some(k12()),
        },
    ];
    let c = build_infinite_chain(&blocks, 4, default_hole_length()).unwrap();
    assert_eq!(c.prefix_bounds, vec![0, 0, 12, 12]);
    assert!(c.prefix_bounds.windows(2).all(|w| w[0] <= w[1]));
    let s = c.surface.unwrap();
    let e = s.euler();
    assert!(e.connected && e.orientable);
    // Each junction consumes two boundaries.
    let total: usize = c.blocks.iter().map(|b| b.boundaries).sum();
    assert_eq!(e.boundaries, total - 2 * 3);

    let missing = [ChainBlock {
        n: 11,
        system: None,
    }];
    assert!(matches!(
        build_infinite_chain(&missing, 1, default_hole_length()),
        Err(Error::Blueprint(_))
    ));
    let wrong = [ChainBlock {
        n: 7,
        system: Some(k12()),
    }];
    assert!(build_infinite_chain(&wrong, 1, default_hole_length()).is_err());
}

#[test]
fn tiny_budgets_are_indeterminate() {
    let s = build_ideal_surface(4, None).unwrap();
    assert_eq!(
        certify_clique(&s, 1).status,
        CertificateStatus::Indeterminate
    );
}

#[test]
fn descriptors_round_trip() {
    let surfaces = [
        build_ideal_surface(5, None).unwrap(),
        build_truncated_surface(4, 0.7, None).unwrap(),
        build_triangle_surface(&k12(), TriangleMode::holed_default()).unwrap(),
        close_surface(
            &build_triangle_surface(&k12(), TriangleMode::holed_default()).unwrap(),
            2,
        )
        .unwrap(),
    ];
    for s in &surfaces {
        let d = s.descriptor();
        let text = serde_json::to_string(&d).unwrap();
        let back: SurfaceDescriptor = serde_json::from_str(&text).unwrap();
        let rebuilt = GluedSurface::from_descriptor(&back).unwrap();
        assert_eq!(rebuilt.euler(), s.euler());
        assert_eq!(rebuilt.descriptor(), d);
    }
    let mut d = surfaces[0].descriptor();
    d.derived.chi += 1;
    assert!(GluedSurface::from_descriptor(&d).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn prop_euler_invariant_under_relabeling(n in 3usize..8, keys in proptest::collection::vec(any::<u32>(), 9)) {
        let s = build_ideal_surface(n, None).unwrap();
        let count = s.polygons().len();
        let mut perm: Vec<usize> = (0..count).collect();
        perm.sort_by_key(|&i| (keys[i], i));
        let moved = s.relabeled(&perm).unwrap();
        prop_assert_eq!(moved.euler(), s.euler());
    }

    #[test]
    fn prop_holed_block_euler_invariant(seed in any::<u64>()) {
        let s = build_triangle_surface(&k12(), TriangleMode::holed_default()).unwrap();
        let count = s.polygons().len();
        let mut perm: Vec<usize> = (0..count).collect();
        // A fixed-point-free shuffle driven by the seed.
        let shift = (seed % (count as u64 - 1)) as usize + 1;
        perm.rotate_left(shift);
        let moved = s.relabeled(&perm).unwrap();
        prop_assert_eq!(moved.euler(), s.euler());
        prop_assert_eq!(close_surface(&moved, 0).unwrap().euler(), close_surface(&s, 0).unwrap().euler());
    }
}
