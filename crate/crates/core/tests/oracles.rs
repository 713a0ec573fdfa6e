//! Exact solvers against exhaustive search on small instances.

use std::collections::BTreeSet;

use mtet_core::gadgets::{make_line, make_ring};
use mtet_core::oracle::{clique_tau_formula, enumerate_min_tets, exact_mhvc, tau};
use mtet_core::{EdgeSet, Graph, Hypergraph, Weight};
use proptest::prelude::*;

/// Every minimum-weight transversal by scanning all edge subsets.
fn brute_tets(g: &Graph) -> (Weight, Vec<EdgeSet>) {
    let m = g.edge_count();
    assert!(m <= 20, "too many edges for exhaustive search");
    let tris: Vec<[usize; 3]> = g.triangles().iter().map(|t| g.triangle_edge_indices(t)).collect();
    let mut best: Option<Weight> = None;
    let mut all = Vec::new();
    for mask in 0u32..(1 << m) {
        if !tris.iter().all(|t| t.iter().any(|&i| mask >> i & 1 == 1)) {
            continue;
        }
        let w: Weight = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| g.weight(i)).sum();
        let set: EdgeSet = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| g.edges()[i]).collect();
        match best {
            Some(b) if w > b => {}
            Some(b) if w == b => all.push(set),
            _ => {
                best = Some(w);
                all = vec![set];
            }
        }
    }
    (best.expect("the full edge set is a transversal"), all)
}

fn brute_mhvc(h: &Hypergraph) -> Weight {
    let n = h.node_count();
    (0u32..(1 << n))
        .filter_map(|mask| {
            let s: BTreeSet<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            h.is_cover(&s).then(|| h.weight_of(&s))
        })
        .min()
        .unwrap()
}

fn graph_from_mask(n: usize, mask: &[bool], weights: Option<&[i64]>) -> Graph {
    let mut pairs = Vec::new();
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask[k] {
                pairs.push((u, v, Weight::from_integer(weights.map_or(1, |w| w[k]))));
            }
            k += 1;
        }
    }
    match weights {
        Some(_) => Graph::with_weights(n, pairs).unwrap(),
        None => Graph::new(n, pairs.into_iter().map(|(u, v, _)| (u, v))).unwrap(),
    }
}

fn small_graph(weighted: bool) -> impl Strategy<Value = Graph> {
    (3usize..=6).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            proptest::collection::vec(proptest::bool::weighted(0.6), pairs),
            proptest::collection::vec(1i64..=5, pairs),
        )
            .prop_map(move |(n, mask, w)| graph_from_mask(n, &mask, weighted.then_some(&w[..])))
    })
}

fn small_hypergraph() -> impl Strategy<Value = Hypergraph> {
    (3usize..=10).prop_flat_map(|n| {
        (
            proptest::collection::vec(1i64..=6, n),
            proptest::collection::vec(proptest::collection::btree_set(0..n, 1..=3), 0..12),
        )
            .prop_map(|(w, edges)| {
                let ws = w.into_iter().map(Weight::from_integer).collect();
                Hypergraph::new(ws, edges.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn tau_matches_exhaustive_unweighted(g in small_graph(false)) {
        let (best, all) = brute_tets(&g);
        let sol = tau(&g).unwrap();
        prop_assert!(sol.optimal);
        prop_assert_eq!(sol.value, best);
        prop_assert!(g.is_tet(&sol.cover).unwrap());
        let mut found = enumerate_min_tets(&g).unwrap();
        let mut all = all;
        found.sort();
        all.sort();
        prop_assert_eq!(found, all);
    }

    #[test]
    fn tau_matches_exhaustive_weighted(g in small_graph(true)) {
        let (best, _) = brute_tets(&g);
        let sol = tau(&g).unwrap();
        prop_assert_eq!(sol.value, best);
        prop_assert_eq!(g.weight_of(&sol.cover).unwrap(), best);
    }

    #[test]
    fn reduction_preserves_optimum(g in small_graph(true)) {
        let rh = g.reduced_hypergraph();
        let vc = exact_mhvc(&rh.hypergraph).unwrap();
        prop_assert_eq!(vc.value, tau(&g).unwrap().value);
        prop_assert!(g.is_tet(&rh.edges_of(&vc.cover)).unwrap());
    }

    #[test]
    fn mhvc_matches_exhaustive(h in small_hypergraph()) {
        let vc = exact_mhvc(&h).unwrap();
        prop_assert!(h.is_cover(&vc.cover));
        prop_assert_eq!(vc.value, brute_mhvc(&h));
    }
}

#[test]
fn clique_values_by_exhaustion() {
    for n in 3..=6 {
        let (best, _) = brute_tets(&Graph::complete(n));
        assert_eq!(best, Weight::from_integer(clique_tau_formula(n) as i64), "K_{n}");
    }
}

#[test]
fn gadget_optima_by_exhaustion() {
    for t in [2, 4, 6] {
        let (best, all) = brute_tets(&make_line(t).unwrap().graph);
        assert_eq!((best, all.len()), (Weight::from_integer(t as i64 / 2), 1), "line t={t}");
    }
    let (best, all) = brute_tets(&make_ring(6).unwrap().graph);
    assert_eq!((best, all.len()), (Weight::from_integer(3), 2));
}
