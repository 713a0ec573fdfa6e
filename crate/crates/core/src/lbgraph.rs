//! The lower-bound graph family: a fixed graph built from cliques, bit
//! gadgets, connectors and 20-rings of triangles, plus input edges that
//! encode two set-disjointness inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::LbError;
use crate::gadgets;
use crate::graph::{Edge, EdgeSet, Graph, NodeId, Weight};
use crate::oracle::{self, SolverConfig, Substructure};

pub const MIN_K: usize = 2;
pub const MAX_K: usize = 6;

/// Names of the four bit-node sets, in index order.
pub const SET_NAMES: [&str; 4] = ["A1", "A2", "B1", "B2"];

/// Edges of one 20-ring over the 14 auxiliary nodes `m0..m13`, the centers
/// `a`, `b`, and the gadget nodes `fA`, `tA`, `fB`, `tB`.
///
/// The designated edges `a-fA`, `a-tA`, `b-fB`, `b-tB` are central edges and
/// are listed here as well. `a-m2` and `b-m4` close the two triangles that
/// make the ring a ring: without them only 18 triangles exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RingNode {
    A,
    B,
    FA,
    TA,
    FB,
    TB,
    M(usize),
}

fn ring_edge_list() -> Vec<(RingNode, RingNode)> {
    use RingNode::*;
    let mut e = vec![(A, FA), (A, TA), (B, FB), (B, TB), (A, M(2)), (B, M(4))];
    e.extend([0, 1, 12].map(|j| (A, M(j))));
    e.extend([5, 6, 7].map(|j| (B, M(j))));
    e.extend([1, 2, 3].map(|j| (TA, M(j))));
    e.extend([3, 4, 5].map(|j| (FB, M(j))));
    e.extend([6, 7, 8].map(|j| (TB, M(j))));
    e.extend([0, 12, 13].map(|j| (FA, M(j))));
    let pairs = [
        (0, 1),
        (2, 3),
        (2, 4),
        (3, 4),
        (5, 6),
        (7, 8),
        (7, 9),
        (8, 9),
        (8, 10),
        (9, 10),
        (9, 11),
        (10, 11),
        (10, 13),
        (11, 12),
        (11, 13),
        (12, 13),
    ];
    e.extend(pairs.map(|(j, p)| (M(j), M(p))));
    e
}

/// Auxiliary ring nodes placed on the A side.
pub const RING_SIDE_A: [usize; 7] = [0, 1, 2, 10, 11, 12, 13];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LbParams {
    pub k: usize,
    /// Most edges at one node over all minimum transversals of K_{k+1}.
    pub mu: usize,
    /// Bit-gadget width, `ceil(log2(mu + 1))`.
    pub l: usize,
    /// Input length `(mu + 1)^2`.
    pub big_k: usize,
    /// Minimum transversal size of K_{k+1}.
    pub tau_clique: usize,
    /// Target transversal size.
    pub m: usize,
}

impl LbParams {
    pub fn new(k: usize) -> Result<Self, LbError> {
        if !(MIN_K..=MAX_K).contains(&k) {
            return Err(LbError::UnsupportedK(k));
        }
        let profile = oracle::clique_profile(k + 1)?;
        let mu = profile.mu;
        if mu >= k {
            return Err(LbError::Internal(format!("mu = {mu} is not below k = {k}")));
        }
        let l = ceil_log2(mu + 1).max(1);
        let big_k = (mu + 1) * (mu + 1);
        let m = 4 * profile.tau + 4 * (mu + 1) + 20 * l;
        Ok(LbParams { k, mu, l, big_k, tau_clique: profile.tau, m })
    }

    /// `2 + 8(mu+1) + 8L + 4k + 28L`.
    pub fn node_count(&self) -> usize {
        2 + 8 * (self.mu + 1) + 8 * self.l + 4 * self.k + 28 * self.l
    }
}

pub fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

/// Node ids of one 20-ring.
#[derive(Clone, Debug, Serialize)]
pub struct RingNodes {
    /// Which pair of sets (1 or 2) the ring couples.
    pub i: usize,
    pub l: usize,
    pub f_a: NodeId,
    pub t_a: NodeId,
    pub f_b: NodeId,
    pub t_b: NodeId,
    pub m: [NodeId; 14],
    pub edges: Vec<Edge>,
}

/// Node ids by role. Sets are indexed as in [`SET_NAMES`].
#[derive(Clone, Debug, Serialize)]
pub struct Roles {
    pub a: NodeId,
    pub b: NodeId,
    pub bits: [Vec<NodeId>; 4],
    pub f: [Vec<NodeId>; 4],
    pub t: [Vec<NodeId>; 4],
    pub c: [Vec<NodeId>; 4],
    pub h: [Vec<NodeId>; 4],
    pub rings: Vec<RingNodes>,
}

impl Roles {
    pub fn center(&self, set: usize) -> NodeId {
        if set < 2 {
            self.a
        } else {
            self.b
        }
    }

    /// Gadget nodes adjacent to bit node `idx` of `set`: `f^j` for a 0 bit, `t^j` for a 1 bit.
    pub fn bin(&self, set: usize, idx: usize) -> Vec<NodeId> {
        (0..self.f[set].len())
            .map(|j| if (idx >> j) & 1 == 0 { self.f[set][j] } else { self.t[set][j] })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct LbInstance {
    pub params: LbParams,
    pub graph: Graph,
    pub roles: Roles,
    /// Nodes on the A side; the rest are on the B side.
    pub side_a: BTreeSet<NodeId>,
    pub inputs: Option<(Vec<bool>, Vec<bool>)>,
    /// Edges added for `x` and for `y`.
    pub input_edges: (Vec<Edge>, Vec<Edge>),
}

impl LbInstance {
    pub fn on_side_a(&self, v: NodeId) -> bool {
        self.side_a.contains(&v)
    }

    pub fn cut_edges(&self) -> Vec<Edge> {
        self.graph.edges().iter().copied().filter(|e| self.on_side_a(e.0) != self.on_side_a(e.1)).collect()
    }

    /// The edge-disjoint pieces whose local optima add up to `M`: the four
    /// center-plus-clique graphs, every connector triangle, every 20-ring.
    pub fn substructures(&self) -> Vec<(String, Substructure)> {
        let r = &self.roles;
        let mut out = Vec::new();
        for s in 0..4 {
            let mut nodes = vec![r.center(s)];
            nodes.extend(&r.c[s]);
            let mut edges = Vec::new();
            for (x, &p) in nodes.iter().enumerate() {
                for &q in &nodes[x + 1..] {
                    edges.push(Edge::new(p, q));
                }
            }
            out.push((format!("clique {}", SET_NAMES[s]), Substructure { edges }));
        }
        for s in 0..4 {
            let center = r.center(s);
            for l in 0..=self.params.mu {
                let (bit, h) = (r.bits[s][l], r.h[s][l]);
                let edges = vec![Edge::new(center, bit), Edge::new(center, h), Edge::new(bit, h)];
                out.push((format!("connector {}^{l}", SET_NAMES[s]), Substructure { edges }));
            }
        }
        for ring in &r.rings {
            out.push((format!("ring {}^{}", ring.i, ring.l), Substructure { edges: ring.edges.clone() }));
        }
        out
    }

    pub fn labels_json(&self) -> serde_json::Value {
        serde_json::json!({
            "params": self.params,
            "side_a": self.side_a,
            "roles": self.roles,
        })
    }
}

/// Local optimum of each registered piece: 10 per ring, 1 per connector, `tau(K_{k+1})` per clique.
fn substructure_optimum(name: &str, p: &LbParams) -> usize {
    if name.starts_with("ring") {
        10
    } else if name.starts_with("connector") {
        1
    } else {
        p.tau_clique
    }
}

pub fn build_fixed(k: usize) -> Result<LbInstance, LbError> {
    let params = LbParams::new(k)?;
    let (mu, l) = (params.mu, params.l);
    let mut labels: BTreeMap<NodeId, String> = BTreeMap::new();
    let mut next = 0usize;
    let mut alloc = |name: String| {
        labels.insert(next, name);
        next += 1;
        next - 1
    };
    let a = alloc("a".into());
    let b = alloc("b".into());
    let mut bits: [Vec<NodeId>; 4] = Default::default();
    let mut f: [Vec<NodeId>; 4] = Default::default();
    let mut t: [Vec<NodeId>; 4] = Default::default();
    let mut c: [Vec<NodeId>; 4] = Default::default();
    let mut h: [Vec<NodeId>; 4] = Default::default();
    for s in 0..4 {
        let name = SET_NAMES[s];
        let lower = name.to_lowercase();
        bits[s] = (0..=mu).map(|i| alloc(format!("{lower}^{i}"))).collect();
        f[s] = (0..l).map(|i| alloc(format!("f_{name}^{i}"))).collect();
        t[s] = (0..l).map(|i| alloc(format!("t_{name}^{i}"))).collect();
        c[s] = (0..k).map(|i| alloc(format!("c_{name}^{i}"))).collect();
        h[s] = (0..=mu).map(|i| alloc(format!("h_{name}^{i}"))).collect();
    }
    let mut ring_ids = Vec::new();
    for i in 1..=2 {
        for ll in 0..l {
            let m: [NodeId; 14] = std::array::from_fn(|j| alloc(format!("m_{i},{ll}^{j}")));
            ring_ids.push((i, ll, m));
        }
    }
    let n = next;
    if n != params.node_count() {
        return Err(LbError::Internal(format!("{n} nodes, expected {}", params.node_count())));
    }

    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let mut add = |x: NodeId, y: NodeId| {
        edges.insert(Edge::new(x, y));
    };
    for s in 0..4 {
        let center = if s < 2 { a } else { b };
        for &v in f[s].iter().chain(&t[s]).chain(&c[s]).chain(&h[s]).chain(&bits[s]) {
            add(center, v);
        }
        for (x, &p) in c[s].iter().enumerate() {
            for &q in &c[s][x + 1..] {
                add(p, q);
            }
        }
        for (idx, &bit) in bits[s].iter().enumerate() {
            for j in 0..l {
                add(bit, if (idx >> j) & 1 == 0 { f[s][j] } else { t[s][j] });
            }
            add(h[s][idx], bit);
            add(h[s][idx], c[s][idx]);
        }
    }
    let mut rings = Vec::new();
    for (i, ll, m) in ring_ids {
        let (sa, sb) = (i - 1, i + 1);
        let ids = |x: RingNode| match x {
            RingNode::A => a,
            RingNode::B => b,
            RingNode::FA => f[sa][ll],
            RingNode::TA => t[sa][ll],
            RingNode::FB => f[sb][ll],
            RingNode::TB => t[sb][ll],
            RingNode::M(j) => m[j],
        };
        let ring_edges: Vec<Edge> = ring_edge_list().into_iter().map(|(x, y)| Edge::new(ids(x), ids(y))).collect();
        for e in &ring_edges {
            add(e.0, e.1);
        }
        rings.push(RingNodes {
            i,
            l: ll,
            f_a: f[sa][ll],
            t_a: t[sa][ll],
            f_b: f[sb][ll],
            t_b: t[sb][ll],
            m,
            edges: ring_edges,
        });
    }

    let mut side_a: BTreeSet<NodeId> = BTreeSet::new();
    side_a.insert(a);
    for s in 0..2 {
        side_a.extend(bits[s].iter().chain(&f[s]).chain(&t[s]).chain(&c[s]).chain(&h[s]));
    }
    for r in &rings {
        side_a.extend(RING_SIDE_A.iter().map(|&j| r.m[j]));
    }

    let graph = Graph::new(n, edges.into_iter().map(|e| (e.0, e.1)))?.with_labels(labels)?;
    let roles = Roles { a, b, bits, f, t, c, h, rings };
    Ok(LbInstance { params, graph, roles, side_a, inputs: None, input_edges: (Vec::new(), Vec::new()) })
}

/// Bit string from `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<bool>, LbError> {
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(LbError::Internal(format!("not a bit: {ch:?}"))),
        })
        .collect()
}

pub fn format_bits(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Add `{a_1^p, a_2^q}` when `x[p(mu+1)+q] = 0` and `{b_1^p, b_2^q}` when `y[..] = 0`.
pub fn add_inputs(inst: &LbInstance, x: &[bool], y: &[bool]) -> Result<LbInstance, LbError> {
    if inst.inputs.is_some() {
        return Err(LbError::AlreadyHasInputs);
    }
    let kk = inst.params.big_k;
    for s in [x, y] {
        if s.len() != kk {
            return Err(LbError::InputLength { expected: kk, got: s.len() });
        }
    }
    let w = inst.params.mu + 1;
    let r = &inst.roles;
    let pick = |bits: &[bool], s1: usize, s2: usize| -> Vec<Edge> {
        (0..kk).filter(|&i| !bits[i]).map(|i| Edge::new(r.bits[s1][i / w], r.bits[s2][i % w])).collect()
    };
    let xe = pick(x, 0, 1);
    let ye = pick(y, 2, 3);
    let graph = inst.graph.with_extra_edges(xe.iter().chain(&ye).map(|e| (e.0, e.1)))?;
    Ok(LbInstance {
        params: inst.params,
        graph,
        roles: inst.roles.clone(),
        side_a: inst.side_a.clone(),
        inputs: Some((x.to_vec(), y.to_vec())),
        input_edges: (xe, ye),
    })
}

/// Set disjointness: false iff some index is 1 in both.
pub fn disj(x: &[bool], y: &[bool]) -> Result<bool, LbError> {
    if x.len() != y.len() {
        return Err(LbError::InputLength { expected: x.len(), got: y.len() });
    }
    Ok(!x.iter().zip(y).any(|(&p, &q)| p && q))
}

/// For each ring, whether its even-indexed shared edges include `a-fA`.
fn ring_parities(inst: &LbInstance) -> Result<Vec<(EdgeSet, EdgeSet)>, LbError> {
    let a = inst.roles.a;
    let mut out = Vec::new();
    for ring in &inst.roles.rings {
        let g = inst.graph.filter_edges(|e| ring.edges.contains(&e));
        let (_, shared) = gadgets::ring_order(&g, 20).ok_or_else(|| LbError::Internal("ring not recognized".into()))?;
        let even: EdgeSet = shared.iter().step_by(2).copied().collect();
        let odd: EdgeSet = shared.iter().skip(1).step_by(2).copied().collect();
        // (with a-fA, with a-tA)
        if even.contains(&Edge::new(a, ring.f_a)) {
            out.push((even, odd));
        } else {
            out.push((odd, even));
        }
    }
    Ok(out)
}

/// The explicit size-`M` transversal that witnesses an intersection at index `(i, j)`.
pub fn construct_cover(inst: &LbInstance, i: usize, j: usize) -> Result<EdgeSet, LbError> {
    let (x, y) = inst.inputs.as_ref().ok_or(LbError::MissingInputs)?;
    let p = inst.params;
    if i > p.mu {
        return Err(LbError::IndexOutOfRange(i));
    }
    if j > p.mu {
        return Err(LbError::IndexOutOfRange(j));
    }
    let index = i * (p.mu + 1) + j;
    if !(x[index] && y[index]) {
        return Err(LbError::NotIntersecting { index, x: x[index], y: y[index] });
    }
    let r = &inst.roles;
    let mut cover = EdgeSet::new();
    for s in 0..4 {
        let idx = if s % 2 == 0 { i } else { j };
        let center = r.center(s);
        // local K_{k+1}: 0 is the center, l + 1 is c^l
        let keep: BTreeSet<NodeId> = (0..=p.mu).filter(|&l| l != idx).map(|l| l + 1).collect();
        let local = oracle::forced_cover(p.k + 1, 0, &keep)?
            .ok_or_else(|| LbError::Internal(format!("no forced clique cover for {}", SET_NAMES[s])))?;
        let global = |v: NodeId| if v == 0 { center } else { r.c[s][v - 1] };
        cover.extend(local.iter().map(|e| Edge::new(global(e.0), global(e.1))));
        cover.insert(Edge::new(center, r.h[s][idx]));
        for l in 0..=p.mu {
            if l != idx {
                cover.insert(Edge::new(center, r.bits[s][l]));
            }
        }
    }
    for (ring, (with_f, with_t)) in r.rings.iter().zip(ring_parities(inst)?) {
        let idx = if ring.i == 1 { i } else { j };
        let bit = (idx >> ring.l) & 1;
        cover.extend(if bit == 0 { with_f } else { with_t });
    }
    if cover.len() != p.m {
        return Err(LbError::Internal(format!("constructed {} edges, expected {}", cover.len(), p.m)));
    }
    if !inst.graph.is_tet(&cover)? {
        return Err(LbError::Internal("constructed set misses a triangle".into()));
    }
    Ok(cover)
}

/// The first `(i, j)` with `{a,a_1^i}`, `{a,a_2^j}`, `{b,b_1^i}`, `{b,b_2^j}` all outside `cover`.
pub fn verify_bit_correspondence(inst: &LbInstance, cover: &EdgeSet) -> Result<(usize, usize), LbError> {
    let m = inst.params.m;
    if cover.len() != m {
        return Err(LbError::WrongCoverSize { expected: m, got: cover.len() });
    }
    if !inst.graph.is_tet(cover)? {
        return Err(LbError::NotATransversal);
    }
    let r = &inst.roles;
    let absent = |s: usize, l: usize| !cover.contains(&Edge::new(r.center(s), r.bits[s][l]));
    for i in 0..=inst.params.mu {
        for j in 0..=inst.params.mu {
            if absent(0, i) && absent(1, j) && absent(2, i) && absent(3, j) {
                return Ok((i, j));
            }
        }
    }
    Err(LbError::NoBitCorrespondence)
}

/// Per registered piece: name, local optimum, edges of `cover` inside it.
pub fn substructure_audit(inst: &LbInstance, cover: &EdgeSet) -> Vec<(String, usize, usize)> {
    inst.substructures()
        .into_iter()
        .map(|(name, sub)| {
            let got = sub.edges.iter().filter(|e| cover.contains(e)).count();
            let need = substructure_optimum(&name, &inst.params);
            (name, need, got)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub x: String,
    pub y: String,
    pub tau: usize,
    pub m: usize,
    pub disj: bool,
    /// `tau >= M`.
    pub tau_at_least_m: bool,
    /// `(tau == M) == !disj`.
    pub equivalence: bool,
    /// Size-`M` transversals examined for the bit correspondence (only when `tau == M`).
    pub covers_checked: usize,
    /// Every examined size-`M` transversal had a correspondence pair.
    pub bit_correspondence_holds: bool,
    pub branches: u64,
    pub elapsed_ms: f64,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.tau_at_least_m && self.equivalence && self.bit_correspondence_holds
    }
}

/// Solve `tau(G_{x,y})` exactly and compare with `M` and disjointness. With
/// `all_covers`, every size-`M` transversal is enumerated and checked for the
/// bit correspondence.
pub fn verify_lemma(inst: &LbInstance, all_covers: bool) -> Result<LemmaReport, LbError> {
    let (x, y) = inst.inputs.as_ref().ok_or(LbError::MissingInputs)?;
    let subs: Vec<Substructure> = inst.substructures().into_iter().map(|(_, s)| s).collect();
    let cfg = SolverConfig::default();
    let sol = oracle::tau_with(&inst.graph, &cfg, &subs)?;
    let tau = sol.value.to_integer() as usize;
    let m = inst.params.m;
    let d = disj(x, y)?;
    let mut covers_checked = 0;
    let mut corr_ok = true;
    if tau == m {
        let mut check = |s: &EdgeSet| {
            covers_checked += 1;
            if verify_bit_correspondence(inst, s).is_err() {
                corr_ok = false;
                return ControlFlow::Break(());
            }
            if all_covers {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        };
        if all_covers {
            oracle::for_each_tet_of_value(&inst.graph, &cfg, &subs, Weight::from_integer(m as i64), &mut check)?;
        } else {
            let _ = check(&sol.cover);
        }
    }
    Ok(LemmaReport {
        x: format_bits(x),
        y: format_bits(y),
        tau,
        m,
        disj: d,
        tau_at_least_m: tau >= m,
        equivalence: (tau == m) == !d,
        covers_checked,
        bit_correspondence_holds: corr_ok,
        branches: sol.stats.branches,
        elapsed_ms: sol.stats.elapsed_ms,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyViolation {
    pub property: u8,
    pub sample: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub property4_checked: bool,
    pub lemma: Vec<LemmaReport>,
    pub violations: Vec<FamilyViolation>,
}

impl FamilyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The sampled inputs: all-ones, all-zeros and the two mixed extremes, then random strings.
pub fn sample_inputs(big_k: usize, count: usize, seed: u64) -> Vec<(Vec<bool>, Vec<bool>)> {
    let ones = vec![true; big_k];
    let zeros = vec![false; big_k];
    let mut out = vec![(ones.clone(), ones.clone()), (zeros.clone(), zeros.clone()), (zeros, ones.clone())];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let x = (0..big_k).map(|_| rng.random_bool(0.5)).collect();
        let y = (0..big_k).map(|_| rng.random_bool(0.5)).collect();
        out.push((x, y));
    }
    out.truncate(count.max(1));
    out
}

/// Structural properties 1-3 of one instance against the fixed graph.
pub fn check_family_properties(fixed: &LbInstance, inst: &LbInstance, sample: usize) -> Vec<FamilyViolation> {
    let mut v = Vec::new();
    if inst.graph.node_count() != fixed.graph.node_count() || inst.graph.labels() != fixed.graph.labels() {
        v.push(FamilyViolation { property: 1, sample, detail: "node set differs from the fixed graph".into() });
    }
    for (prop, edges, side_a) in [(2u8, &inst.input_edges.0, true), (3u8, &inst.input_edges.1, false)] {
        for e in edges {
            if inst.on_side_a(e.0) != side_a || inst.on_side_a(e.1) != side_a {
                v.push(FamilyViolation { property: prop, sample, detail: format!("input edge {e} leaves its side") });
            }
        }
    }
    let mut expected: BTreeSet<Edge> = fixed.graph.edges().iter().copied().collect();
    expected.extend(inst.input_edges.0.iter().chain(&inst.input_edges.1));
    let actual: BTreeSet<Edge> = inst.graph.edges().iter().copied().collect();
    if expected != actual {
        v.push(FamilyViolation { property: 1, sample, detail: "edges beyond the fixed graph and inputs".into() });
    }
    v
}

/// Check family properties on sampled inputs; property 4 (the Lemma) only when `exact`.
pub fn verify_family(k: usize, samples: usize, seed: u64, exact: bool) -> Result<FamilyReport, LbError> {
    let fixed = build_fixed(k)?;
    let inputs = sample_inputs(fixed.params.big_k, samples, seed);
    let per_sample: Vec<Result<(Vec<FamilyViolation>, Option<LemmaReport>), LbError>> = inputs
        .par_iter()
        .enumerate()
        .map(|(idx, (x, y))| {
            let inst = add_inputs(&fixed, x, y)?;
            let mut viol = check_family_properties(&fixed, &inst, idx);
            let lemma = if exact {
                let rep = verify_lemma(&inst, false)?;
                if !rep.holds() {
                    viol.push(FamilyViolation {
                        property: 4,
                        sample: idx,
                        detail: format!("tau = {}, M = {}, disj = {}", rep.tau, rep.m, rep.disj),
                    });
                }
                Some(rep)
            } else {
                None
            };
            Ok((viol, lemma))
        })
        .collect();
    let mut violations = Vec::new();
    let mut lemma = Vec::new();
    for r in per_sample {
        let (v, l) = r?;
        violations.extend(v);
        lemma.extend(l);
    }
    Ok(FamilyReport { k, samples: inputs.len(), seed, property4_checked: exact, lemma, violations })
}

#[derive(Clone, Debug, Serialize)]
pub struct CutReport {
    pub k: usize,
    pub n: usize,
    pub big_k: usize,
    pub cut: usize,
    pub per_ring: Vec<usize>,
    /// Cut edges outside every ring.
    pub outside_rings: usize,
    /// `K / (|C| * log2 n)`.
    pub bound: f64,
}

pub fn cut_and_bound_report(inst: &LbInstance) -> CutReport {
    let cut = inst.cut_edges();
    let per_ring: Vec<usize> =
        inst.roles.rings.iter().map(|r| r.edges.iter().filter(|e| inst.on_side_a(e.0) != inst.on_side_a(e.1)).count()).collect();
    let n = inst.graph.node_count();
    let bound = inst.params.big_k as f64 / (cut.len() as f64 * (n as f64).log2());
    CutReport {
        k: inst.params.k,
        n,
        big_k: inst.params.big_k,
        cut: cut.len(),
        outside_rings: cut.len() - per_ring.iter().sum::<usize>(),
        per_ring,
        bound,
    }
}

/// Triangles strictly between consecutive designated edges of each ring,
/// in the cyclic order `a-fA`, `a-tA`, `b-fB`, `b-tB`.
pub fn ring_separations(inst: &LbInstance) -> Result<Vec<[usize; 4]>, LbError> {
    let (a, b) = (inst.roles.a, inst.roles.b);
    let mut out = Vec::new();
    for ring in &inst.roles.rings {
        let g = inst.graph.filter_edges(|e| ring.edges.contains(&e));
        let (_, shared) = gadgets::ring_order(&g, 20).ok_or_else(|| LbError::Internal("ring not recognized".into()))?;
        let pos = |e: Edge| shared.iter().position(|&s| s == e);
        let marks = [Edge::new(a, ring.f_a), Edge::new(a, ring.t_a), Edge::new(b, ring.f_b), Edge::new(b, ring.t_b)];
        let p: Vec<usize> = marks.iter().map(|&e| pos(e)).collect::<Option<_>>().ok_or_else(|| {
            LbError::Internal("designated edge is not shared by two ring triangles".into())
        })?;
        // shared[i] sits between T_i and T_{i+1}; the triangles strictly between
        // shared[p] and shared[q] going forward are T_{p+1}..=T_q
        let gap = |from: usize, to: usize| (to + 20 - from) % 20;
        // orient the walk so that a-tA follows a-fA within the shorter direction
        let forward = [gap(p[0], p[1]), gap(p[1], p[2]), gap(p[2], p[3]), gap(p[3], p[0])];
        let backward = [gap(p[1], p[0]), gap(p[2], p[1]), gap(p[3], p[2]), gap(p[0], p[3])];
        let seps = if forward.iter().sum::<usize>() == 20 { forward } else { backward };
        out.push(seps);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_k2_k4() {
        let p = LbParams::new(2).unwrap();
        assert_eq!((p.mu, p.l, p.big_k, p.m, p.node_count()), (1, 1, 4, 32, 62));
        let p = LbParams::new(4).unwrap();
        assert_eq!((p.mu, p.l, p.m), (2, 2, 68));
        assert!(LbParams::new(1).is_err());
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9].map(ceil_log2), [0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn disj_cases() {
        assert!(!disj(&[true], &[true]).unwrap());
        assert!(disj(&[true, false], &[false, true]).unwrap());
        assert!(disj(&[false, false], &[true, true]).unwrap());
        assert!(disj(&[true], &[true, false]).is_err());
    }

    #[test]
    fn fixed_graph_k2_shape() {
        let inst = build_fixed(2).unwrap();
        assert_eq!(inst.graph.node_count(), 62);
        assert_eq!(inst.roles.rings.len(), 2);
        for ring in &inst.roles.rings {
            let g = inst.graph.filter_edges(|e| ring.edges.contains(&e));
            assert!(gadgets::is_ring_of_triangles(&g, 20));
        }
        for seps in ring_separations(&inst).unwrap() {
            assert_eq!(seps, [3, 5, 3, 9]);
        }
    }

    #[test]
    fn input_edges() {
        let fixed = build_fixed(2).unwrap();
        let ones = vec![true; 4];
        assert_eq!(add_inputs(&fixed, &ones, &ones).unwrap().graph.edge_count(), fixed.graph.edge_count());
        let mut x = ones.clone();
        x[0] = false;
        let inst = add_inputs(&fixed, &x, &ones).unwrap();
        let r = &fixed.roles;
        assert_eq!(inst.input_edges.0, vec![Edge::new(r.bits[0][0], r.bits[1][0])]);
        assert!(add_inputs(&fixed, &ones[..3], &ones).is_err());
    }
}
