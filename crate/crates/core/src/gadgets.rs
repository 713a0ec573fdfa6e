//! Lines and rings of triangles, the ring recognizer, and the pair of graphs
//! showing that exact transversals need diameter-many rounds.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::GadgetError;
use crate::graph::{Edge, EdgeSet, Graph, NodeId, Triangle};
use crate::iso;
use crate::oracle;

/// `t` triangles in a row: rungs `{v_i,u_i}`, diagonals `{v_i,u_{i+1}}` and the two rails.
#[derive(Clone, Debug)]
pub struct LineOfTriangles {
    pub t: usize,
    pub graph: Graph,
}

impl LineOfTriangles {
    pub fn v(&self, i: usize) -> NodeId {
        i
    }

    pub fn u(&self, i: usize) -> NodeId {
        self.t / 2 + 1 + i
    }

    /// The diagonals `{v_i, u_{i+1}}`, the unique minimum transversal.
    pub fn diagonals(&self) -> EdgeSet {
        (0..self.t / 2).map(|i| Edge::new(self.v(i), self.u(i + 1))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RingOfTriangles {
    pub t: usize,
    pub graph: Graph,
    /// Cyclic triangle order `T_0..T_{t-1}`.
    pub order: Vec<Triangle>,
    /// `shared[i]` is the edge of `T_i` and `T_{i+1 mod t}`.
    pub shared: Vec<Edge>,
}

impl RingOfTriangles {
    /// Shared edges with even (`parity = 0`) or odd index.
    pub fn alternate(&self, parity: usize) -> EdgeSet {
        self.shared.iter().skip(parity).step_by(2).copied().collect()
    }
}

fn check_t(t: usize, min: usize) -> Result<(), GadgetError> {
    if t % 2 == 1 {
        return Err(GadgetError::InvalidT { t, reason: "must be even" });
    }
    if t < min {
        return Err(GadgetError::InvalidT { t, reason: "below supported range" });
    }
    Ok(())
}

fn line_edges(t: usize) -> Vec<(usize, usize)> {
    let h = t / 2;
    let u = |i: usize| h + 1 + i;
    let mut e = Vec::new();
    for i in 0..h {
        e.push((i, i + 1));
        e.push((u(i), u(i + 1)));
        e.push((i, u(i + 1)));
    }
    for i in 0..=h {
        e.push((i, u(i)));
    }
    e
}

fn line_labels(t: usize, prime: bool) -> BTreeMap<NodeId, String> {
    let h = t / 2;
    let tick = if prime { "'" } else { "" };
    let mut labels = BTreeMap::new();
    for i in 0..=h {
        labels.insert(i, format!("v{tick}{i}"));
        labels.insert(h + 1 + i, format!("u{tick}{i}"));
    }
    labels
}

pub fn make_line(t: usize) -> Result<LineOfTriangles, GadgetError> {
    check_t(t, 2)?;
    let graph = Graph::new(t + 2, line_edges(t))
        .and_then(|g| g.with_labels(line_labels(t, false)))
        .map_err(|e| GadgetError::Internal(e.to_string()))?;
    Ok(LineOfTriangles { t, graph })
}

/// A ring of `t` triangles. For `t >= 8` the two ends of a `t`-line are
/// identified (`v_{t/2} = v_0`, `u_{t/2} = u_0`); at `t = 6` that closure
/// creates two extra triangles and no 6-node ring exists, so the wheel with
/// six spokes is used instead.
pub fn make_ring(t: usize) -> Result<RingOfTriangles, GadgetError> {
    check_t(t, 6)?;
    let graph = if t == 6 {
        let mut e: Vec<(usize, usize)> = (1..=6).map(|i| (0, i)).collect();
        e.extend((1..=6).map(|i| (i, i % 6 + 1)));
        let labels = std::iter::once((0, "hub".to_string())).chain((1..=6).map(|i| (i, format!("c{}", i - 1)))).collect();
        Graph::new(7, e).and_then(|g| g.with_labels(labels))
    } else {
        let h = t / 2;
        let wrap = |x: usize| if x == h { 0 } else if x == 2 * h + 1 { h + 1 } else { x };
        // line ids: v_i = i, u_i = h + 1 + i; fold them onto 0..t
        let fold = |x: usize| {
            let x = wrap(x);
            if x <= h {
                x
            } else {
                x - 1
            }
        };
        let edges: BTreeSet<Edge> = line_edges(t).into_iter().map(|(a, b)| Edge::new(fold(a), fold(b))).collect();
        let labels = (0..h).flat_map(|i| [(i, format!("v{i}")), (h + i, format!("u{i}"))]).collect();
        Graph::new(t, edges.into_iter().map(|e| (e.0, e.1))).and_then(|g| g.with_labels(labels))
    }
    .map_err(|e| GadgetError::Internal(e.to_string()))?;
    let (order, shared) = ring_order(&graph, t).ok_or_else(|| GadgetError::Internal(format!("{t}-ring failed recognition")))?;
    Ok(RingOfTriangles { t, graph, order, shared })
}

/// Cyclic order of the triangles and the shared edges, if `g` is a ring of `t` triangles.
///
/// The walk starts at the smallest triangle and continues to its smaller neighbour.
pub fn ring_order(g: &Graph, t: usize) -> Option<(Vec<Triangle>, Vec<Edge>)> {
    let tris = g.triangles();
    if tris.len() != t || t < 3 {
        return None;
    }
    let mut by_edge: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (i, tr) in tris.iter().enumerate() {
        for e in tr.edges() {
            by_edge.entry(e).or_default().push(i);
        }
    }
    let mut nbrs: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); t];
    for (e, ts) in &by_edge {
        match ts.len() {
            1 => {}
            2 => {
                nbrs[ts[0]].push((ts[1], *e));
                nbrs[ts[1]].push((ts[0], *e));
            }
            _ => return None,
        }
    }
    if nbrs.iter().any(|n| n.len() != 2) {
        return None;
    }
    for n in &mut nbrs {
        n.sort();
        if n[0].0 == n[1].0 {
            return None;
        }
    }
    let mut order = vec![0usize];
    let mut shared = Vec::with_capacity(t);
    let (mut prev, mut cur) = (usize::MAX, 0usize);
    loop {
        let &(next, e) = nbrs[cur].iter().find(|(x, _)| *x != prev)?;
        shared.push(e);
        if next == 0 {
            break;
        }
        if order.len() == t {
            return None;
        }
        order.push(next);
        prev = cur;
        cur = next;
    }
    if order.len() != t {
        return None;
    }
    Some((order.into_iter().map(|i| tris[i]).collect(), shared))
}

pub fn is_ring_of_triangles(g: &Graph, t: usize) -> bool {
    ring_order(g, t).is_some()
}

/// Where the two padding nodes of the shorter line attach.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaddingPlacement {
    /// On the first diagonal `{v_0, u_1}`.
    FirstDiagonal,
    /// On the last diagonal `{v_{t/2-1}, u_{t/2}}`.
    LastDiagonal,
}

/// A `t`-line padded with two nodes next to a `(t+2)`-line of equal size.
#[derive(Clone, Debug)]
pub struct Theorem1Pair {
    pub t: usize,
    pub placement: PaddingPlacement,
    pub short: Graph,
    pub long: Graph,
    pub probe_short: NodeId,
    pub probe_long: NodeId,
    pub diameter_short: usize,
    pub diameter_long: usize,
    /// Line node of the short graph to its counterpart in the long graph.
    pub correspondence: BTreeMap<NodeId, NodeId>,
    /// Edges at the probe in the unique minimum transversal of each graph.
    pub output_short: EdgeSet,
    pub output_long: EdgeSet,
}

pub fn make_theorem1_pair(t: usize) -> Result<Theorem1Pair, GadgetError> {
    make_theorem1_pair_with(t, PaddingPlacement::FirstDiagonal)
}

pub fn make_theorem1_pair_with(t: usize, placement: PaddingPlacement) -> Result<Theorem1Pair, GadgetError> {
    check_t(t, 8)?;
    let h = t / 2;
    let line = make_line(t)?;
    let (x, y) = match placement {
        PaddingPlacement::FirstDiagonal => (line.v(0), line.u(1)),
        PaddingPlacement::LastDiagonal => (line.v(h - 1), line.u(h)),
    };
    let (w1, w2) = (t + 2, t + 3);
    let mut edges = line_edges(t);
    edges.extend([(w1, x), (w1, y), (w2, x), (w2, y)]);
    let mut labels = line_labels(t, false);
    labels.insert(w1, "w1".into());
    labels.insert(w2, "w2".into());
    let short = Graph::new(t + 4, edges).and_then(|g| g.with_labels(labels)).map_err(|e| GadgetError::Internal(e.to_string()))?;
    let long_line = make_line(t + 2)?;
    let long = long_line
        .graph
        .clone()
        .with_labels(line_labels(t + 2, true))
        .map_err(|e| GadgetError::Internal(e.to_string()))?;

    let mut correspondence = BTreeMap::new();
    for i in 0..=h {
        correspondence.insert(line.v(i), long_line.v(h - i));
        correspondence.insert(line.u(i), long_line.u(h + 1 - i));
    }
    let p = t / 4;
    let probe_short = line.v(p);
    let probe_long = long_line.v(h - p);

    let unique_output = |g: &Graph, probe: NodeId| -> Result<EdgeSet, GadgetError> {
        let optima = oracle::enumerate_min_tets(g)?;
        if optima.len() != 1 {
            return Err(GadgetError::Internal(format!("expected a unique optimum, found {}", optima.len())));
        }
        Ok(optima[0].incident_to(probe))
    };
    Ok(Theorem1Pair {
        t,
        placement,
        output_short: unique_output(&short, probe_short)?,
        output_long: unique_output(&long, probe_long)?,
        diameter_short: short.diameter(),
        diameter_long: long.diameter(),
        short,
        long,
        probe_short,
        probe_long,
        correspondence,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IndistinguishabilityReport {
    pub t: usize,
    pub radius: usize,
    pub balls_isomorphic: bool,
    /// The node correspondence restricted to the probe balls is itself a rooted isomorphism.
    pub correspondence_is_isomorphism: bool,
    /// Short-graph output mapped through the correspondence.
    pub mapped_output_short: Vec<Edge>,
    pub output_long: Vec<Edge>,
    pub outputs_differ: bool,
}

impl IndistinguishabilityReport {
    pub fn holds(&self) -> bool {
        self.balls_isomorphic && self.correspondence_is_isomorphism && self.outputs_differ
    }
}

/// Compare the probe views at `radius` and the forced outputs.
pub fn check_indistinguishability(pair: &Theorem1Pair, radius: usize) -> Result<IndistinguishabilityReport, GadgetError> {
    let to_internal = |e: crate::error::GraphError| GadgetError::Internal(e.to_string());
    let b1 = pair.short.ball(pair.probe_short, radius).map_err(to_internal)?;
    let b2 = pair.long.ball(pair.probe_long, radius).map_err(to_internal)?;
    let balls_isomorphic = iso::rooted_isomorphism(&b1, &b2).map_err(to_internal)?.is_some();
    let correspondence_is_isomorphism = iso::is_rooted_isomorphism(&b1, &b2, |v| pair.correspondence.get(&v).copied());
    let mapped: Option<EdgeSet> = pair
        .output_short
        .iter()
        .map(|e| Some(Edge::new(*pair.correspondence.get(&e.0)?, *pair.correspondence.get(&e.1)?)))
        .collect();
    let mapped = mapped.unwrap_or_default();
    Ok(IndistinguishabilityReport {
        t: pair.t,
        radius,
        balls_isomorphic,
        correspondence_is_isomorphism,
        outputs_differ: mapped != pair.output_long,
        mapped_output_short: mapped.into_iter().collect(),
        output_long: pair.output_long.iter().copied().collect(),
    })
}

/// `floor(D_long / 2) - 1`, the radius checked by default.
pub fn default_radius(pair: &Theorem1Pair) -> usize {
    (pair.diameter_long / 2).saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_shapes() {
        let l = make_line(2).unwrap();
        assert_eq!((l.graph.node_count(), l.graph.edge_count(), l.graph.triangles().len()), (4, 5, 2));
        let l = make_line(4).unwrap();
        assert_eq!((l.graph.node_count(), l.graph.edge_count(), l.graph.triangles().len()), (6, 9, 4));
        assert!(make_line(1).is_err());
        assert!(make_line(0).is_err());
    }

    #[test]
    fn ring_shapes() {
        let r = make_ring(6).unwrap();
        assert_eq!((r.graph.edge_count(), r.graph.triangles().len()), (12, 6));
        let r = make_ring(20).unwrap();
        assert_eq!(r.graph.triangles().len(), 20);
        assert!(make_ring(4).is_err());
        assert!(make_ring(7).is_err());
    }

    #[test]
    fn recognizer_rejects_non_rings() {
        assert!(is_ring_of_triangles(&make_ring(8).unwrap().graph, 8));
        assert!(!is_ring_of_triangles(&make_line(8).unwrap().graph, 8));
        assert!(!is_ring_of_triangles(&Graph::complete(4), 4));
    }

    #[test]
    fn theorem1_pair_t8() {
        let p = make_theorem1_pair(8).unwrap();
        assert_eq!((p.short.node_count(), p.long.node_count()), (12, 12));
        assert_eq!((p.diameter_short, p.diameter_long), (5, 6));
        let r = check_indistinguishability(&p, default_radius(&p)).unwrap();
        assert!(r.holds(), "{r:?}");
    }
}
