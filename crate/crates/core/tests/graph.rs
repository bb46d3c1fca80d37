use hypchroma::graph::*;
use proptest::prelude::*;

/// Smallest k admitting a proper k-coloring, by trying every assignment.
fn chromatic_by_enumeration(g: &Graph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    for k in 1..=n {
        let total = k.pow(n as u32);
        for code in 0..total {
            let mut c = vec![0; n];
            let mut x = code;
            for slot in c.iter_mut() {
                *slot = x % k;
                x /= k;
            }
            if edges.iter().all(|&(u, v)| c[u] != c[v]) {
                return k;
            }
        }
    }
    n
}

fn random_graph() -> impl Strategy<Value = Graph> {
    (0usize..=8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        proptest::collection::vec(any::<bool>(), m).prop_map(move |keep| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .zip(keep)
                .filter_map(|(&e, k)| k.then_some(e))
                .collect();
            Graph::from_edges(n, &edges)
        })
    })
}

#[test]
fn small_examples() {
    let empty = Graph::new(0);
    assert_eq!(greedy_color(&empty, Ordering::Dsatur).count, 0);
    assert_eq!(exact_chromatic(&empty, EXACT_LIMIT).unwrap(), 0);
    assert_eq!(
        greedy_color(&Graph::complete(3), Ordering::Natural).count,
        3
    );
    assert_eq!(
        exact_chromatic(&Graph::complete(4), EXACT_LIMIT).unwrap(),
        4
    );
    assert_eq!(exact_chromatic(&Graph::cycle(5), EXACT_LIMIT).unwrap(), 3);
    assert_eq!(exact_chromatic(&Graph::cycle(6), EXACT_LIMIT).unwrap(), 2);
}

#[test]
fn petersen_is_three_chromatic() {
    let p = Graph::petersen();
    assert_eq!(
        (p.vertex_count(), p.edge_count(), p.max_degree()),
        (10, 15, 3)
    );
    assert_eq!(chromatic_by_enumeration(&p), 3);
    assert_eq!(exact_chromatic(&p, EXACT_LIMIT).unwrap(), 3);
}

#[test]
fn exact_refuses_large_graphs() {
    let g = Graph::cycle(EXACT_LIMIT + 1);
    assert!(exact_chromatic(&g, EXACT_LIMIT).is_err());
    assert_eq!(exact_chromatic(&g, EXACT_LIMIT + 1).unwrap(), 3);
}

#[test]
fn orderings_parse() {
    assert_eq!("dsatur".parse::<Ordering>().unwrap(), Ordering::Dsatur);
    assert_eq!("natural".parse::<Ordering>().unwrap(), Ordering::Natural);
    assert!("random".parse::<Ordering>().is_err());
}

proptest! {
    #[test]
    fn prop_exact_matches_enumeration(g in random_graph()) {
        let want = chromatic_by_enumeration(&g);
        prop_assert_eq!(exact_chromatic(&g, EXACT_LIMIT).unwrap(), want);
        prop_assert_eq!(brute_force_chromatic(&g), want);
    }

    #[test]
    fn prop_greedy_is_proper_and_brooks_bounded(g in random_graph()) {
        for order in [Ordering::Natural, Ordering::LargestFirst, Ordering::Dsatur] {
            let c = greedy_color(&g, order);
            prop_assert!(c.is_proper(&g));
            prop_assert!(c.count <= g.max_degree() + 1);
            prop_assert!(c.count >= exact_chromatic(&g, EXACT_LIMIT).unwrap());
        }
    }

    #[test]
    fn prop_clique_is_a_clique(g in random_graph()) {
        let k = greedy_clique(&g);
        for (i, &u) in k.iter().enumerate() {
            for &v in &k[i + 1..] {
                prop_assert!(g.has_edge(u, v));
            }
        }
    }
}
