//! Gadget and lower-bound graph structure beyond the acceptance runs.

use mtet_core::gadgets::{
    check_indistinguishability, default_radius, is_ring_of_triangles, make_line, make_ring, make_theorem1_pair_with,
    PaddingPlacement,
};
use mtet_core::lbgraph::{
    add_inputs, build_fixed, construct_cover, cut_and_bound_report, disj, format_bits, parse_bits, ring_separations,
    verify_bit_correspondence, verify_family, LbParams,
};
use mtet_core::oracle::tau;
use proptest::prelude::*;

#[test]
fn ring_recognizer_rejects_lines() {
    for t in [6, 8, 10, 12] {
        assert!(is_ring_of_triangles(&make_ring(t).unwrap().graph, t));
        assert!(!is_ring_of_triangles(&make_line(t).unwrap().graph, t));
        assert!(!is_ring_of_triangles(&make_ring(t).unwrap().graph, t + 2));
    }
}

#[test]
fn larger_lines_have_half_tau() {
    for t in [12, 16, 20] {
        let g = make_line(t).unwrap().graph;
        assert_eq!(tau(&g).unwrap().value.to_integer() as usize, t / 2);
    }
}

#[test]
fn both_padding_placements_hide_the_probe() {
    for placement in [PaddingPlacement::FirstDiagonal, PaddingPlacement::LastDiagonal] {
        let p = make_theorem1_pair_with(10, placement).unwrap();
        assert_eq!(p.short.node_count(), p.long.node_count());
        let r = check_indistinguishability(&p, default_radius(&p)).unwrap();
        assert!(r.balls_isomorphic && r.outputs_differ, "{placement:?}");
    }
}

#[test]
fn parameters_for_small_k() {
    let p = LbParams::new(2).unwrap();
    assert_eq!((p.mu, p.l, p.big_k, p.tau_clique, p.m, p.node_count()), (1, 1, 4, 1, 32, 62));
    let p = LbParams::new(4).unwrap();
    assert_eq!((p.mu, p.big_k, p.tau_clique), (2, 9, 4));
}

#[test]
fn ring_designated_edges_are_spread() {
    let inst = build_fixed(2).unwrap();
    assert_eq!(ring_separations(&inst).unwrap(), vec![[3, 5, 3, 9]; 2]);
}

#[test]
fn k4_covers_decode() {
    let fixed = build_fixed(4).unwrap();
    let ones = vec![true; fixed.params.big_k];
    let inst = add_inputs(&fixed, &ones, &ones).unwrap();
    let side = fixed.params.mu + 1;
    for i in 0..side {
        for j in 0..side {
            let c = construct_cover(&inst, i, j).unwrap();
            assert_eq!(c.len(), fixed.params.m);
            assert!(inst.graph.is_tet(&c).unwrap());
            assert_eq!(verify_bit_correspondence(&inst, &c).unwrap(), (i, j));
        }
    }
    let cut = cut_and_bound_report(&fixed);
    assert_eq!((cut.cut, cut.outside_rings), (24, 0));
}

#[test]
fn k4_family_structure() {
    let rep = verify_family(4, 12, 3, false).unwrap();
    assert!(rep.holds(), "{:?}", rep.violations);
}

proptest! {
    #[test]
    fn bits_round_trip(x in proptest::collection::vec(any::<bool>(), 1..40)) {
        prop_assert_eq!(parse_bits(&format_bits(&x)).unwrap(), x);
    }

    #[test]
    fn disjointness_is_pointwise(x in proptest::collection::vec(any::<bool>(), 9), y in proptest::collection::vec(any::<bool>(), 9)) {
        prop_assert_eq!(disj(&x, &y).unwrap(), !x.iter().zip(&y).any(|(a, b)| *a && *b));
    }
}
