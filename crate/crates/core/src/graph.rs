//! Undirected simple graphs with optional exact rational edge weights,
//! plus triangles, edge sets, balls and the triangle hypergraph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type NodeId = usize;

/// Exact positive edge weight.
pub type Weight = Ratio<i64>;

/// An unordered pair, always stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub NodeId, pub NodeId);

impl Edge {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint opposite `v`, if `v` is an endpoint.
    pub fn other(&self, v: NodeId) -> Option<NodeId> {
        if self.0 == v {
            Some(self.1)
        } else if self.1 == v {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

/// Three distinct nodes, sorted ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triangle(pub [NodeId; 3]);

impl Triangle {
    pub fn new(a: NodeId, b: NodeId, c: NodeId) -> Self {
        let mut t = [a, b, c];
        t.sort_unstable();
        Triangle(t)
    }

    pub fn edges(&self) -> [Edge; 3] {
        let [a, b, c] = self.0;
        [Edge(a, b), Edge(a, c), Edge(b, c)]
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }

    /// The vertex of the triangle not on `e`.
    pub fn opposite(&self, e: Edge) -> Option<NodeId> {
        if !self.edges().contains(&e) {
            return None;
        }
        self.0.iter().copied().find(|&x| !e.contains(x))
    }
}

/// A set of edges, ordered lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeSet(BTreeSet<Edge>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: Edge) -> bool {
        self.0.insert(e)
    }

    pub fn remove(&mut self, e: &Edge) -> bool {
        self.0.remove(e)
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.0.iter()
    }

    pub fn extend<I: IntoIterator<Item = Edge>>(&mut self, it: I) {
        self.0.extend(it)
    }

    pub fn incident_to(&self, v: NodeId) -> EdgeSet {
        self.0.iter().copied().filter(|e| e.contains(v)).collect()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        EdgeSet(iter.into_iter().collect())
    }
}

impl IntoIterator for EdgeSet {
    type Item = Edge;
    type IntoIter = std::collections::btree_set::IntoIter<Edge>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a EdgeSet {
    type Item = &'a Edge;
    type IntoIter = std::collections::btree_set::Iter<'a, Edge>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Immutable undirected simple graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    // Sorted by neighbor; each entry carries the edge index.
    adj: Vec<Vec<(NodeId, usize)>>,
    weights: Option<Vec<Weight>>,
    labels: BTreeMap<NodeId, String>,
}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::build(n, edges.into_iter().collect(), None, BTreeMap::new())
    }

    pub fn with_weights<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, Weight)>,
    {
        let (pairs, ws): (Vec<_>, Vec<_>) = edges.into_iter().map(|(u, v, w)| ((u, v), w)).unzip();
        Self::build(n, pairs, Some(ws), BTreeMap::new())
    }

    fn build(
        n: usize,
        pairs: Vec<(NodeId, NodeId)>,
        weights: Option<Vec<Weight>>,
        labels: BTreeMap<NodeId, String>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut keyed: Vec<(Edge, Option<Weight>)> = Vec::with_capacity(pairs.len());
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::NodeOutOfRange { node: u.max(v), n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let w = weights.as_ref().map(|ws| ws[i]);
            if let Some(w) = w {
                if w <= Weight::zero() {
                    return Err(GraphError::NonPositiveWeight(Edge::new(u, v)));
                }
            }
            keyed.push((Edge::new(u, v), w));
        }
        keyed.sort_by_key(|(e, _)| *e);
        for pair in keyed.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(GraphError::DuplicateEdge(pair[0].0));
            }
        }
        if let Some((node, _)) = labels.iter().find(|(&id, _)| id >= n) {
            return Err(GraphError::NodeOutOfRange { node: *node, n });
        }
        let edges: Vec<Edge> = keyed.iter().map(|(e, _)| *e).collect();
        let weights = weights.map(|_| keyed.iter().map(|(_, w)| w.unwrap()).collect());
        let mut adj = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.0].push((e.1, i));
            adj[e.1].push((e.0, i));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges, adj, weights, labels })
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push((u, v));
            }
        }
        Graph::new(n, pairs).expect("complete graph is valid")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order; positions are the edge indices.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    pub fn incident(&self, v: NodeId) -> &[(NodeId, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |&(x, _)| x).ok().map(|p| list[p].1)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weight(&self, edge_index: usize) -> Weight {
        match &self.weights {
            Some(ws) => ws[edge_index],
            None => Weight::one(),
        }
    }

    pub fn edge_weight(&self, e: Edge) -> Option<Weight> {
        self.edge_index(e.0, e.1).map(|i| self.weight(i))
    }

    pub fn labels(&self) -> &BTreeMap<NodeId, String> {
        &self.labels
    }

    pub fn label(&self, v: NodeId) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn with_labels(mut self, labels: BTreeMap<NodeId, String>) -> Result<Self, GraphError> {
        if let Some((&node, _)) = labels.iter().find(|(&id, _)| id >= self.n) {
            return Err(GraphError::NodeOutOfRange { node, n: self.n });
        }
        self.labels = labels;
        Ok(self)
    }

    /// Look a node up by its role label.
    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().find(|(_, l)| l.as_str() == label).map(|(&id, _)| id)
    }

    /// Sum of weights of the given edges; errors on non-edges.
    pub fn weight_of(&self, s: &EdgeSet) -> Result<Weight, GraphError> {
        let mut total = Weight::zero();
        for e in s {
            total += self.edge_weight(*e).ok_or(GraphError::NotAnEdge(*e))?;
        }
        Ok(total)
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs(&self, source: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Largest finite eccentricity; 0 for a single node. Disconnected pairs are ignored.
    pub fn diameter(&self) -> usize {
        (0..self.n)
            .map(|v| self.bfs(v).into_iter().flatten().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.bfs(0).iter().all(Option::is_some)
    }

    /// Subgraph keeping only the edges for which `keep` holds (all nodes, weights and labels kept).
    pub fn filter_edges<F: Fn(Edge) -> bool>(&self, keep: F) -> Graph {
        let mut pairs = Vec::new();
        let mut ws = Vec::new();
        for (i, &e) in self.edges.iter().enumerate() {
            if keep(e) {
                pairs.push((e.0, e.1));
                ws.push(self.weight(i));
            }
        }
        let weights = self.weights.as_ref().map(|_| ws);
        Graph::build(self.n, pairs, weights, self.labels.clone()).expect("subgraph of a valid graph")
    }

    /// Graph with extra edges added; weights of new edges are 1 when weighted.
    pub fn with_extra_edges<I>(&self, extra: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut pairs: Vec<_> = self.edges.iter().map(|e| (e.0, e.1)).collect();
        let before = pairs.len();
        pairs.extend(extra);
        let weights = self.weights.as_ref().map(|ws| {
            let mut ws = ws.clone();
            ws.resize(pairs.len(), Weight::one());
            ws
        });
        debug_assert!(pairs.len() >= before);
        Graph::build(self.n, pairs, weights, self.labels.clone())
    }

    /// Induced subgraph on `nodes` (relabelled to `0..nodes.len()` in the given order).
    pub fn induced(&self, nodes: &[NodeId]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            pos[v] = i;
        }
        let mut pairs = Vec::new();
        let mut ws = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if pos[e.0] != usize::MAX && pos[e.1] != usize::MAX {
                pairs.push((pos[e.0], pos[e.1]));
                ws.push(self.weight(i));
            }
        }
        let labels = nodes
            .iter()
            .enumerate()
            .filter_map(|(i, v)| self.labels.get(v).map(|l| (i, l.clone())))
            .collect();
        let weights = self.weights.as_ref().map(|_| ws);
        Graph::build(nodes.len().max(1), pairs, weights, labels).expect("induced subgraph is valid")
    }

    /// Every 3-clique exactly once, sorted.
    pub fn triangles(&self) -> Vec<Triangle> {
        let mut out = Vec::new();
        for &Edge(u, v) in &self.edges {
            // common neighbours w > v keep each triangle once
            let (a, b) = (&self.adj[u], &self.adj[v]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].0.cmp(&b[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = a[i].0;
                        if w > v {
                            out.push(Triangle([u, v, w]));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Triangles containing node `v`.
    pub fn triangles_at(&self, v: NodeId) -> Vec<Triangle> {
        let nbrs: Vec<NodeId> = self.neighbors(v).collect();
        let mut out = Vec::new();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if self.has_edge(a, b) {
                    out.push(Triangle::new(v, a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Indices of the three edges of `t`.
    pub fn triangle_edge_indices(&self, t: &Triangle) -> [usize; 3] {
        t.edges().map(|e| self.edge_index(e.0, e.1).expect("triangle edge present"))
    }

    /// Ball of radius `r` around `v`: the subgraph induced by nodes within `r` hops.
    pub fn ball(&self, v: NodeId, r: usize) -> Result<Ball, GraphError> {
        if v >= self.n {
            return Err(GraphError::NodeOutOfRange { node: v, n: self.n });
        }
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::new();
        dist.insert(v, 0usize);
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            if d == r {
                continue;
            }
            for w in self.neighbors(u) {
                if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(w) {
                    slot.insert(d + 1);
                    queue.push_back(w);
                }
            }
        }
        let nodes: Vec<NodeId> = dist.keys().copied().collect();
        let graph = self.induced(&nodes);
        let center = nodes.binary_search(&v).unwrap();
        let distances = nodes.iter().map(|u| dist[u]).collect();
        Ok(Ball { nodes, distances, graph, center })
    }

    /// Whether `s` hits every triangle. Errors if `s` contains a non-edge.
    pub fn is_tet(&self, s: &EdgeSet) -> Result<bool, GraphError> {
        for e in s {
            if !self.has_edge(e.0, e.1) {
                return Err(GraphError::NotAnEdge(*e));
            }
        }
        Ok(self.triangles().iter().all(|t| t.edges().iter().any(|e| s.contains(e))))
    }

    /// The graph whose nodes are this graph's edges and whose hyperedges are its triangles.
    pub fn reduced_hypergraph(&self) -> ReducedHypergraph {
        ReducedHypergraph::from_graph(self)
    }
}

/// Induced ball around a center, with the original ids of its nodes.
#[derive(Clone, Debug)]
pub struct Ball {
    /// Original node ids, ascending. Local id `i` is `nodes[i]`.
    pub nodes: Vec<NodeId>,
    /// Hop distance from the center, per local id.
    pub distances: Vec<usize>,
    pub graph: Graph,
    /// Local id of the center.
    pub center: usize,
}

impl Ball {
    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn local(&self, v: NodeId) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }
}

/// Hypergraph with positive node weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    weights: Vec<Weight>,
    hyperedges: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(weights: Vec<Weight>, hyperedges: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let n = weights.len();
        if let Some(w) = weights.iter().find(|w| **w <= Weight::zero()) {
            return Err(GraphError::NonPositiveNodeWeight(*w));
        }
        let mut incidence = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(hyperedges.len());
        for (j, mut he) in hyperedges.into_iter().enumerate() {
            he.sort_unstable();
            he.dedup();
            if he.is_empty() {
                return Err(GraphError::EmptyHyperedge(j));
            }
            for &x in &he {
                if x >= n {
                    return Err(GraphError::NodeOutOfRange { node: x, n });
                }
                incidence[x].push(j);
            }
            normalized.push(he);
        }
        Ok(Hypergraph { weights, hyperedges: normalized, incidence })
    }

    pub fn unit(n: usize, hyperedges: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        Self::new(vec![Weight::one(); n], hyperedges)
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn weight(&self, v: usize) -> Weight {
        self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// Hyperedges containing `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Largest hyperedge cardinality.
    pub fn rank(&self) -> usize {
        self.hyperedges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest number of hyperedges at one node.
    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_cover(&self, nodes: &BTreeSet<usize>) -> bool {
        self.hyperedges.iter().all(|he| he.iter().any(|x| nodes.contains(x)))
    }

    pub fn weight_of(&self, nodes: &BTreeSet<usize>) -> Weight {
        nodes.iter().map(|&v| self.weights[v]).sum()
    }
}

/// The triangle hypergraph of a graph with back-references both ways.
#[derive(Clone, Debug)]
pub struct ReducedHypergraph {
    pub hypergraph: Hypergraph,
    /// Hypergraph node `i` is graph edge `edges[i]`.
    pub edges: Vec<Edge>,
    /// Hyperedge `j` is graph triangle `triangles[j]`.
    pub triangles: Vec<Triangle>,
    edge_pos: BTreeMap<Edge, usize>,
    triangle_pos: BTreeMap<Triangle, usize>,
}

impl ReducedHypergraph {
    fn from_graph(g: &Graph) -> Self {
        let edges = g.edges().to_vec();
        let triangles = g.triangles();
        let weights = (0..edges.len()).map(|i| g.weight(i)).collect();
        let hyperedges = triangles.iter().map(|t| g.triangle_edge_indices(t).to_vec()).collect();
        let hypergraph = Hypergraph::new(weights, hyperedges).expect("triangle hyperedges are valid");
        let edge_pos = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let triangle_pos = triangles.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        ReducedHypergraph { hypergraph, edges, triangles, edge_pos, triangle_pos }
    }

    pub fn node_of_edge(&self, e: Edge) -> Option<usize> {
        self.edge_pos.get(&e).copied()
    }

    pub fn hyperedge_of_triangle(&self, t: Triangle) -> Option<usize> {
        self.triangle_pos.get(&t).copied()
    }

    /// Graph edges corresponding to a set of hypergraph nodes.
    pub fn edges_of(&self, nodes: &BTreeSet<usize>) -> EdgeSet {
        nodes.iter().map(|&i| self.edges[i]).collect()
    }
}

/// Wire form of a graph: `{"n", "edges", "weights"?, "labels"?}` with weights as `"p/q"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[NodeId; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, String>>,
}

pub fn format_weight(w: &Weight) -> String {
    format!("{}/{}", w.numer(), w.denom())
}

pub fn parse_weight(s: &str) -> Result<Weight, GraphError> {
    let bad = || GraphError::BadWeight(s.to_string());
    let s = s.trim();
    let w = match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Weight::new(p, q)
        }
        None => parse_decimal(s).ok_or_else(bad)?,
    };
    Ok(w)
}

/// Decimal literal such as `0.125` as an exact ratio.
pub fn parse_decimal(s: &str) -> Option<Ratio<i64>> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
        return None;
    }
    let numer: i64 = digits.parse().ok()?;
    let denom = 10i64.checked_pow(frac.len() as u32)?;
    let r = Ratio::new(numer, denom);
    Some(if neg { -r } else { r })
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|e| [e.0, e.1]).collect(),
            weights: g.weights.as_ref().map(|ws| ws.iter().map(format_weight).collect()),
            labels: if g.labels.is_empty() {
                None
            } else {
                Some(g.labels.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
            },
        }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, Self::Error> {
        let pairs: Vec<_> = j.edges.iter().map(|p| (p[0], p[1])).collect();
        let weights = match j.weights {
            Some(ws) => {
                if ws.len() != pairs.len() {
                    return Err(GraphError::WeightCount { edges: pairs.len(), weights: ws.len() });
                }
                Some(ws.iter().map(|s| parse_weight(s)).collect::<Result<Vec<_>, _>>()?)
            }
            None => None,
        };
        let mut labels = BTreeMap::new();
        for (k, v) in j.labels.unwrap_or_default() {
            let id: NodeId = k.parse().map_err(|_| GraphError::BadLabelKey(k.clone()))?;
            labels.insert(id, v);
        }
        Graph::build(j.n, pairs, weights, labels)
    }
}

impl Graph {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Graph, GraphError> {
        let j: GraphJson = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        Graph::try_from(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn triangle_counts() {
        assert_eq!(Graph::complete(4).triangles().len(), 4);
        assert_eq!(cycle(5).triangles().len(), 0);
        assert_eq!(Graph::complete(3).triangles(), vec![Triangle([0, 1, 2])]);
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(GraphError::SelfLoop(0))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(_))));
        assert!(matches!(Graph::new(3, [(0, 3)]), Err(GraphError::NodeOutOfRange { .. })));
        let zero = Weight::zero();
        assert!(matches!(
            Graph::with_weights(2, [(0, 1, zero)]),
            Err(GraphError::NonPositiveWeight(_))
        ));
    }

    #[test]
    fn balls_on_small_graphs() {
        let p5 = path(5);
        let b0 = p5.ball(2, 0).unwrap();
        assert_eq!(b0.nodes, vec![2]);
        assert_eq!(b0.graph.edge_count(), 0);
        assert_eq!(p5.ball(2, 2).unwrap().nodes, vec![0, 1, 2, 3, 4]);
        let k4 = Graph::complete(4);
        let b = k4.ball(3, 1).unwrap();
        assert_eq!(b.graph.edge_count(), 6);
        assert!(p5.ball(7, 1).is_err());
    }

    #[test]
    fn tet_checks() {
        let k4 = Graph::complete(4);
        let s: EdgeSet = [Edge(0, 1), Edge(2, 3)].into_iter().collect();
        assert!(k4.is_tet(&s).unwrap());
        let s: EdgeSet = [Edge(0, 1)].into_iter().collect();
        assert!(!k4.is_tet(&s).unwrap());
        assert!(cycle(5).is_tet(&EdgeSet::new()).unwrap());
        let bogus: EdgeSet = [Edge(0, 2)].into_iter().collect();
        assert!(matches!(path(3).is_tet(&bogus), Err(GraphError::NotAnEdge(_))));
    }

    #[test]
    fn reduced_hypergraph_counts() {
        let h = Graph::complete(4).reduced_hypergraph();
        assert_eq!(h.hypergraph.node_count(), 6);
        assert_eq!(h.hypergraph.hyperedges().len(), 4);
        assert_eq!(h.hypergraph.rank(), 3);
        let h = cycle(6).reduced_hypergraph();
        assert_eq!(h.hypergraph.node_count(), 6);
        assert!(h.hypergraph.hyperedges().is_empty());
    }

    #[test]
    fn json_round_trip_with_weights_and_labels() {
        let g = Graph::with_weights(3, [(0, 1, Weight::new(1, 2)), (1, 2, Weight::new(3, 1))])
            .unwrap()
            .with_labels([(0, "a".to_string())].into_iter().collect())
            .unwrap();
        let text = g.to_json();
        assert!(text.contains("\"1/2\""));
        assert_eq!(Graph::from_json(&text).unwrap(), g);
    }

    #[test]
    fn decimal_weights_parse_exactly() {
        assert_eq!(parse_weight("0.125").unwrap(), Weight::new(1, 8));
        assert_eq!(parse_weight("3/6").unwrap(), Weight::new(1, 2));
        assert!(parse_weight("1/0").is_err());
        assert!(parse_weight("x").is_err());
    }
}
