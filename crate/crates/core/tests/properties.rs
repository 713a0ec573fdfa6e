//! Invariants of the simulator, the approximations and the decomposition.

use mtet_core::carving::{
    audit_carving, ball_carve_distributed, ball_carve_sequential, network_decomposition, validate_decomposition,
};
use mtet_core::mhvc::{is_maximal_matching, mhvc_direct, mtet_via_mhvc, MatchingProgram, MhvcConfig, MhvcVariant, PrimalDualProgram};
use mtet_core::oracle::{exact_mhvc, map_cover, tau, SolverConfig};
use mtet_core::simnet::hyper::{compare_runs, direct_run_hypergraph, run_hypergraph_on_graph};
use mtet_core::simnet::programs::{triangle_discovery, MinIdBroadcast, TriangleDiscovery};
use mtet_core::simnet::{run, SimModel};
use mtet_core::verify::random_graph;
use mtet_core::{Graph, Hypergraph, Weight};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seeded_graph(n: usize, p: f64, seed: u64, weighted: bool) -> Graph {
    let g = random_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed));
    if weighted {
        mtet_core::verify::weighted_copy(&g, seed)
    } else {
        g
    }
}

fn graph_params() -> impl Strategy<Value = (usize, f64, u64)> {
    (5usize..=12, prop_oneof![Just(0.3), Just(0.5), Just(0.7)], any::<u64>())
}

fn model() -> impl Strategy<Value = SimModel> {
    prop_oneof![Just(SimModel::local()), Just(SimModel::congest())]
}

fn eps() -> impl Strategy<Value = Weight> {
    prop_oneof![Just(Weight::new(1, 10)), Just(Weight::new(1, 2)), Just(Weight::new(1, 1)), Just(Weight::new(3, 1))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn transcripts_are_deterministic((n, p, s) in graph_params(), m in model()) {
        let g = seeded_graph(n, p, s, false);
        let a = run(&g, &TriangleDiscovery, m, s, 1000).unwrap();
        let b = run(&g, &TriangleDiscovery, m, s, 1000).unwrap();
        prop_assert_eq!(&a.transcript, &b.transcript);
        let c = run(&g, &MinIdBroadcast, m, s, 1000).unwrap();
        let d = run(&g, &MinIdBroadcast, m, s, 1000).unwrap();
        prop_assert_eq!(c.transcript, d.transcript);
    }

    #[test]
    fn congest_messages_fit((n, p, s) in graph_params(), extra in 0usize..8) {
        let g = seeded_graph(n, p, s, false);
        let base = SimModel::default_bandwidth(n);
        let m = SimModel::congest_with(base + extra).unwrap();
        let disc = triangle_discovery(&g, m).unwrap();
        prop_assert!(disc.max_edge_bits <= base + extra);
        for v in 0..n {
            let mut got = disc.triangles[v].clone();
            let mut want = g.triangles_at(v);
            got.sort();
            want.sort();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn carving_is_sound((n, p, s) in graph_params(), e in eps(), weighted in any::<bool>()) {
        let g = seeded_graph(n, p, s, weighted);
        let cfg = SolverConfig::default();
        let opt = tau(&g).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left((s % n as u64) as usize);
        let c = ball_carve_sequential(&g, e, &order, &cfg).unwrap();
        prop_assert!(g.is_tet(&c.cover).unwrap());
        prop_assert!(c.value <= (Weight::from_integer(1) + e) * opt.value);
        let audit = audit_carving(&g, e, &c.steps, &c.cover, Some(&opt.cover)).unwrap();
        prop_assert!(audit.holds(), "{:?}", audit);
    }

    #[test]
    fn hypergraph_cover_within_factor(
        n in 3usize..=10,
        w in proptest::collection::vec(1i64..=6, 10),
        edges in proptest::collection::vec(proptest::collection::btree_set(0usize..10, 1..=3), 0..14),
        seed in any::<u64>(),
    ) {
        let edges: Vec<Vec<usize>> =
            edges.into_iter().map(|s| s.into_iter().map(|v| v % n).collect::<std::collections::BTreeSet<_>>().into_iter().collect()).collect();
        let h = Hypergraph::new(w[..n].iter().map(|&x| Weight::from_integer(x)).collect(), edges).unwrap();
        let opt = exact_mhvc(&h).unwrap().value;

        let m = mhvc_direct(&h, &MhvcConfig::new(MhvcVariant::Matching), seed).unwrap();
        prop_assert!(h.is_cover(&m.cover));
        prop_assert!(is_maximal_matching(&h, &m.selected));
        let unit = Hypergraph::new(vec![Weight::from_integer(1); n], h.hyperedges().to_vec()).unwrap();
        prop_assert!(Weight::from_integer(m.cover.len() as i64) <= Weight::from_integer(3) * exact_mhvc(&unit).unwrap().value);

        let cfg = MhvcConfig::new(MhvcVariant::PrimalDual);
        let pd = mhvc_direct(&h, &cfg, seed).unwrap();
        prop_assert!(h.is_cover(&pd.cover));
        prop_assert!(pd.value <= cfg.factor() * opt);
    }

    #[test]
    fn pipeline_output_is_a_transversal((n, p, s) in graph_params(), m in model(), pd in any::<bool>()) {
        let g = seeded_graph(n, p, s, pd);
        let variant = if pd { MhvcVariant::PrimalDual } else { MhvcVariant::Matching };
        let out = mtet_via_mhvc(&g, &MhvcConfig::new(variant), m, s, true).unwrap();
        prop_assert!(out.valid && g.is_tet(&out.cover).unwrap());
        prop_assert_eq!(out.matches_direct, Some(true));
        if let Some(b) = out.bandwidth_bits {
            prop_assert!(out.max_edge_bits <= b);
        }
    }

    #[test]
    fn relabelled_optimum_stays_optimal(n in 3usize..=6, perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let g = Graph::complete(n);
        let opt = tau(&g).unwrap().cover;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let mapped = map_cover(&g, &opt, &perm).unwrap();
        prop_assert_eq!(mapped.len(), opt.len());
        prop_assert!(g.is_tet(&mapped).unwrap());
    }

    #[test]
    fn graph_json_round_trips((n, p, s) in graph_params(), weighted in any::<bool>()) {
        let g = seeded_graph(n, p, s, weighted);
        prop_assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn distributed_carving_matches_sequential((n, p, s) in graph_params(), e in eps()) {
        let g = seeded_graph(n, p, s, false);
        let cfg = SolverConfig::default();
        let d = ball_carve_distributed(&g, e, s, &cfg).unwrap();
        validate_decomposition(&g, &d.decomposition).unwrap();
        let seq = ball_carve_sequential(&g, e, &d.carving.order, &cfg).unwrap();
        prop_assert_eq!(&seq.cover, &d.carving.cover);
        prop_assert_eq!(&seq.steps, &d.carving.steps);
    }

    #[test]
    fn decomposition_valid_on_long_cycles(n in 40usize..100, power in 1usize..=2, seed in any::<u64>()) {
        let g = Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
        let dec = network_decomposition(&g, power, seed);
        prop_assert!(validate_decomposition(&g, &dec).is_ok(), "{:?}", validate_decomposition(&g, &dec));
        prop_assert!(dec.members.len() > 1);
        let limit = 8.0 * (n as f64).log2();
        prop_assert!((dec.c as f64) <= limit && (dec.d as f64) <= limit);
    }
}

/// Simulated hyperedge and node histories equal a direct run, on 50 seeds.
#[test]
fn simulation_fidelity_over_seeds() {
    let graphs = [Graph::complete(5), seeded_graph(10, 0.5, 11, false), seeded_graph(9, 0.6, 12, true)];
    for g in &graphs {
        let rh = g.reduced_hypergraph();
        let n = g.node_count();
        let pd = PrimalDualProgram::new(rh.hypergraph.weights(), rh.hypergraph.max_degree(), PrimalDualProgram::default_eps()).unwrap();
        for seed in 0..50 {
            for m in [SimModel::local(), SimModel::congest()] {
                let direct = direct_run_hypergraph(&rh, n, &MatchingProgram, seed, 10_000).unwrap();
                let sim = run_hypergraph_on_graph(g, &MatchingProgram, m, seed, 10_000).unwrap();
                compare_runs(&rh, &direct, &sim).unwrap_or_else(|e| panic!("matching seed {seed} {m}: {e}"));
                let direct = direct_run_hypergraph(&rh, n, &pd, seed, 10_000).unwrap();
                let sim = run_hypergraph_on_graph(g, &pd, m, seed, 10_000).unwrap();
                compare_runs(&rh, &direct, &sim).unwrap_or_else(|e| panic!("primal-dual seed {seed} {m}: {e}"));
            }
        }
    }
}

#[test]
fn congest_overhead_scales_with_degree() {
    let g = seeded_graph(16, 0.4, 5, false);
    let cfg = MhvcConfig::new(MhvcVariant::Matching);
    let local = mtet_via_mhvc(&g, &cfg, SimModel::local(), 1, false).unwrap();
    let congest = mtet_via_mhvc(&g, &cfg, SimModel::congest(), 1, false).unwrap();
    assert_eq!(local.cover, congest.cover);
    assert!(congest.graph_rounds as f64 <= 2.0 * g.max_degree() as f64 * local.graph_rounds as f64);
}
