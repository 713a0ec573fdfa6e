//! Exact ground-truth solvers: minimum triangle edge transversal, all optima,
//! clique profiles and minimum hypergraph vertex cover.

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::time::Instant;

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::OracleError;
use crate::graph::{Edge, EdgeSet, Graph, Hypergraph, NodeId, Weight};
use crate::hitting::Instance;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Largest number of triangles (or hyperedges) accepted.
    pub budget: usize,
    /// Largest number of optima `enumerate_min_tets` will return.
    pub enumeration_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { budget: 5000, enumeration_cap: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SolveStats {
    pub branches: u64,
    pub elapsed_ms: f64,
}

/// A triangle edge transversal with its exact value.
#[derive(Clone, Debug)]
pub struct CoverSolution {
    pub cover: EdgeSet,
    pub value: Weight,
    pub optimal: bool,
    pub stats: SolveStats,
}

/// A hypergraph vertex cover with its exact value.
#[derive(Clone, Debug)]
pub struct VertexCoverSolution {
    pub cover: BTreeSet<usize>,
    pub value: Weight,
    pub optimal: bool,
    pub stats: SolveStats,
}

#[derive(Clone, Debug)]
pub struct CliqueProfile {
    pub n: usize,
    pub tau: usize,
    pub mu: usize,
    /// Every optimum of K_n.
    pub optima: Vec<EdgeSet>,
    /// The optima attaining `mu` edges at node 0.
    pub witnesses: Vec<EdgeSet>,
}

/// An edge set whose triangles must be covered from inside it; registered
/// substructures must be pairwise edge-disjoint.
#[derive(Clone, Debug, Default)]
pub struct Substructure {
    pub edges: Vec<Edge>,
}

pub const MAX_PROFILE_N: usize = 7;

/// `n(n-1)/2 - floor(n^2/4)`: edges outside a largest triangle-free subgraph of K_n.
pub fn clique_tau_formula(n: usize) -> usize {
    n * n.saturating_sub(1) / 2 - n * n / 4
}

/// Integer costs proportional to the weights, sharing one scale factor.
pub(crate) fn scale_weights(ws: &[Weight]) -> Result<(Vec<u64>, i64), OracleError> {
    let mut lcm = 1i64;
    for w in ws {
        lcm = lcm.lcm(w.denom());
    }
    let mut costs = Vec::with_capacity(ws.len());
    let mut total: u64 = 0;
    for w in ws {
        let c = w.numer().checked_mul(lcm / w.denom()).ok_or(OracleError::WeightOverflow)?;
        let c = u64::try_from(c).map_err(|_| OracleError::WeightOverflow)?;
        total = total.checked_add(c).ok_or(OracleError::WeightOverflow)?;
        costs.push(c);
    }
    Ok((costs, lcm))
}

struct TriangleInstance {
    inst: Instance,
    lcm: i64,
}

fn triangle_instance(g: &Graph, cfg: &SolverConfig, subs: &[Substructure]) -> Result<TriangleInstance, OracleError> {
    let triangles = g.triangles();
    if triangles.len() > cfg.budget {
        return Err(OracleError::BudgetExceeded { sets: triangles.len(), budget: cfg.budget });
    }
    let ws: Vec<Weight> = (0..g.edge_count()).map(|i| g.weight(i)).collect();
    let (costs, lcm) = scale_weights(&ws)?;
    let sets = triangles.iter().map(|t| g.triangle_edge_indices(t).to_vec()).collect();
    let mut inst = Instance::new(costs, sets);
    if !subs.is_empty() {
        let mut groups = Vec::with_capacity(subs.len());
        for s in subs {
            let mut idx = Vec::with_capacity(s.edges.len());
            for e in &s.edges {
                idx.push(g.edge_index(e.0, e.1).ok_or(crate::error::GraphError::NotAnEdge(*e))?);
            }
            groups.push(idx);
        }
        inst = inst.with_groups(groups).map_err(|e| OracleError::OverlappingSubstructures(g.edges()[e]))?;
    }
    Ok(TriangleInstance { inst, lcm })
}

fn to_weight(cost: u64, lcm: i64) -> Weight {
    Weight::new(cost as i64, lcm)
}

fn edges_of(g: &Graph, idx: &[usize]) -> EdgeSet {
    idx.iter().map(|&i| g.edges()[i]).collect()
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Minimum-weight triangle edge transversal.
pub fn tau(g: &Graph) -> Result<CoverSolution, OracleError> {
    tau_with(g, &SolverConfig::default(), &[])
}

pub fn tau_with(g: &Graph, cfg: &SolverConfig, subs: &[Substructure]) -> Result<CoverSolution, OracleError> {
    let start = Instant::now();
    let ti = triangle_instance(g, cfg, subs)?;
    let (cost, sol, stats) = ti.inst.minimize();
    Ok(CoverSolution {
        cover: edges_of(g, &sol),
        value: to_weight(cost, ti.lcm),
        optimal: true,
        stats: SolveStats { branches: stats.branches, elapsed_ms: elapsed_ms(start) },
    })
}

/// All minimum transversals, lexicographically ordered.
pub fn enumerate_min_tets(g: &Graph) -> Result<Vec<EdgeSet>, OracleError> {
    enumerate_min_tets_with(g, &SolverConfig::default(), &[])
}

pub fn enumerate_min_tets_with(
    g: &Graph,
    cfg: &SolverConfig,
    subs: &[Substructure],
) -> Result<Vec<EdgeSet>, OracleError> {
    let mut out = Vec::new();
    let cap = cfg.enumeration_cap;
    let mut over = false;
    for_each_min_tet(g, cfg, subs, |s| {
        if out.len() == cap {
            over = true;
            return ControlFlow::Break(());
        }
        out.push(s.clone());
        ControlFlow::Continue(())
    })?;
    if over {
        return Err(OracleError::CapExceeded { cap });
    }
    out.sort();
    Ok(out)
}

/// Stream every minimum transversal to `visit`; returns the optimum value.
pub fn for_each_min_tet<F>(g: &Graph, cfg: &SolverConfig, subs: &[Substructure], mut visit: F) -> Result<Weight, OracleError>
where
    F: FnMut(&EdgeSet) -> ControlFlow<()>,
{
    let ti = triangle_instance(g, cfg, subs)?;
    let (opt, _, _) = ti.inst.minimize();
    let _ = ti.inst.enumerate(opt, |idx| visit(&edges_of(g, idx)));
    Ok(to_weight(opt, ti.lcm))
}

/// Like [`for_each_min_tet`] but visits every transversal of exactly the given value,
/// which must not be below the optimum.
pub fn for_each_tet_of_value<F>(
    g: &Graph,
    cfg: &SolverConfig,
    subs: &[Substructure],
    value: Weight,
    mut visit: F,
) -> Result<(), OracleError>
where
    F: FnMut(&EdgeSet) -> ControlFlow<()>,
{
    let ti = triangle_instance(g, cfg, subs)?;
    let scaled = value * Weight::from_integer(ti.lcm);
    if !scaled.is_integer() || scaled < Weight::zero() {
        return Ok(());
    }
    let target = *scaled.numer() as u64;
    let _ = ti.inst.enumerate(target, |idx| visit(&edges_of(g, idx)));
    Ok(())
}

/// Lower bound the solver would use at a partial assignment, plus the weight
/// already included. `None` if the assignment cannot be completed.
pub fn partial_lower_bound(
    g: &Graph,
    included: &EdgeSet,
    excluded: &EdgeSet,
    subs: &[Substructure],
) -> Result<Option<Weight>, OracleError> {
    let ti = triangle_instance(g, &SolverConfig::default(), subs)?;
    let index = |s: &EdgeSet| -> Result<Vec<usize>, OracleError> {
        s.iter()
            .map(|e| g.edge_index(e.0, e.1).ok_or(OracleError::Graph(crate::error::GraphError::NotAnEdge(*e))))
            .collect()
    };
    let inc = index(included)?;
    let exc = index(excluded)?;
    Ok(ti.inst.bound_with(&inc, &exc).map(|c| to_weight(c, ti.lcm)))
}

/// Maximum number of edges at `v` over all minimum transversals.
///
/// Optima are streamed rather than stored, so no enumeration cap applies.
pub fn mu(g: &Graph, v: NodeId) -> Result<usize, OracleError> {
    if v >= g.node_count() {
        return Err(crate::error::GraphError::NodeOutOfRange { node: v, n: g.node_count() }.into());
    }
    let deg = g.degree(v);
    let mut best = 0;
    for_each_min_tet(g, &SolverConfig::default(), &[], |s| {
        best = best.max(s.iter().filter(|e| e.contains(v)).count());
        if best == deg {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(best)
}

pub fn clique_profile(n: usize) -> Result<CliqueProfile, OracleError> {
    if !(3..=MAX_PROFILE_N).contains(&n) {
        return Err(OracleError::CliqueSize { n, min: 3, max: MAX_PROFILE_N });
    }
    let k = Graph::complete(n);
    let optima = enumerate_min_tets(&k)?;
    let tau = optima[0].len();
    let at0 = |s: &EdgeSet| s.iter().filter(|e| e.contains(0)).count();
    let mu = optima.iter().map(at0).max().unwrap_or(0);
    let witnesses = optima.iter().filter(|s| at0(s) == mu).cloned().collect();
    Ok(CliqueProfile { n, tau, mu, optima, witnesses })
}

/// Image of `s` under the node permutation `perm` (`perm[v]` is the image of `v`).
pub fn map_cover(g: &Graph, s: &EdgeSet, perm: &[NodeId]) -> Result<EdgeSet, OracleError> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(OracleError::BadPermutation(n));
    }
    let mut out = EdgeSet::new();
    for e in s {
        let m = Edge::new(perm[e.0], perm[e.1]);
        if !g.has_edge(m.0, m.1) {
            return Err(crate::error::GraphError::NotAnEdge(m).into());
        }
        out.insert(m);
    }
    Ok(out)
}

/// A minimum transversal of K_n whose edges at `v` are exactly `{v, u}` for `u` in `neighbors`.
pub fn forced_cover(n: usize, v: NodeId, neighbors: &BTreeSet<NodeId>) -> Result<Option<EdgeSet>, OracleError> {
    let profile = clique_profile(n)?;
    if neighbors.len() != profile.mu {
        return Err(OracleError::WrongSetSize { expected: profile.mu, got: neighbors.len() });
    }
    if v >= n || neighbors.iter().any(|&u| u >= n || u == v) {
        return Err(OracleError::BadPermutation(n));
    }
    let want: EdgeSet = neighbors.iter().map(|&u| Edge::new(v, u)).collect();
    Ok(profile.optima.into_iter().find(|s| s.incident_to(v) == want))
}

pub fn forced_cover_exists(n: usize, v: NodeId, neighbors: &BTreeSet<NodeId>) -> Result<bool, OracleError> {
    forced_cover(n, v, neighbors).map(|s| s.is_some())
}

/// Minimum-weight vertex cover of a hypergraph.
pub fn exact_mhvc(h: &Hypergraph) -> Result<VertexCoverSolution, OracleError> {
    exact_mhvc_with(h, &SolverConfig::default())
}

pub fn exact_mhvc_with(h: &Hypergraph, cfg: &SolverConfig) -> Result<VertexCoverSolution, OracleError> {
    let start = Instant::now();
    if h.hyperedges().len() > cfg.budget {
        return Err(OracleError::BudgetExceeded { sets: h.hyperedges().len(), budget: cfg.budget });
    }
    let (costs, lcm) = scale_weights(h.weights())?;
    let inst = Instance::new(costs, h.hyperedges().to_vec());
    let (cost, sol, stats) = inst.minimize();
    Ok(VertexCoverSolution {
        cover: sol.into_iter().collect(),
        value: to_weight(cost, lcm),
        optimal: true,
        stats: SolveStats { branches: stats.branches, elapsed_ms: elapsed_ms(start) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_values() {
        for (n, tau, mu) in [(3, 1, 1), (4, 2, 1), (5, 4, 2)] {
            let p = clique_profile(n).unwrap();
            assert_eq!((p.tau, p.mu), (tau, mu), "K_{n}");
            assert_eq!(p.tau, clique_tau_formula(n));
        }
        assert!(clique_profile(2).is_err());
    }

    #[test]
    fn triangle_free_is_zero() {
        let c5 = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let s = tau(&c5).unwrap();
        assert!(s.value.is_zero() && s.cover.is_empty());
        assert_eq!(enumerate_min_tets(&c5).unwrap(), vec![EdgeSet::new()]);
    }

    #[test]
    fn weighted_tau_is_exact() {
        let g = Graph::with_weights(
            3,
            [(0, 1, Weight::new(1, 3)), (0, 2, Weight::new(1, 2)), (1, 2, Weight::new(2, 1))],
        )
        .unwrap();
        let s = tau(&g).unwrap();
        assert_eq!(s.value, Weight::new(1, 3));
        assert!(s.cover.contains(&Edge(0, 1)));
    }

    #[test]
    fn forced_cover_checks_size() {
        let nb: BTreeSet<usize> = [1, 2, 3].into_iter().collect();
        assert!(matches!(forced_cover_exists(5, 0, &nb), Err(OracleError::WrongSetSize { .. })));
        let nb: BTreeSet<usize> = [1, 2].into_iter().collect();
        assert!(forced_cover_exists(5, 0, &nb).unwrap());
    }

    #[test]
    fn map_cover_rejects_non_edges() {
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let s: EdgeSet = [Edge(0, 1)].into_iter().collect();
        assert!(map_cover(&p3, &s, &[0, 2, 1]).is_err());
        assert_eq!(map_cover(&p3, &s, &[0, 1, 2]).unwrap(), s);
        assert!(map_cover(&p3, &s, &[0, 0, 1]).is_err());
    }

    #[test]
    fn mhvc_small_cases() {
        let h = Hypergraph::unit(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(exact_mhvc(&h).unwrap().value, Weight::from_integer(1));
        let h = Hypergraph::unit(3, vec![]).unwrap();
        assert_eq!(exact_mhvc(&h).unwrap().value, Weight::zero());
    }
}
