//! Ball carving: grow a ball until the local optimum stops growing by more
//! than a `1 + eps` factor, commit that local cover, remove the ball's
//! internal edges, move on. A randomized network decomposition of a power
//! graph lets clusters of one colour carve in parallel.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ApproxError, OracleError, SimError};
use crate::graph::{Edge, EdgeSet, Graph, NodeId, Weight};
use crate::oracle::{tau_with, SolverConfig};
use crate::simnet::bits::{id_bits, BitReader, BitWriter, Payload};
use crate::simnet::{run_with, NodeCtx, NodeProgram, NodeRng, RunOptions, SimModel};

/// Residual-graph distances from `v`.
fn distances(g: &Graph, v: NodeId) -> Vec<Option<usize>> {
    g.bfs(v)
}

fn within(d: &[Option<usize>], x: NodeId, r: i64) -> bool {
    r >= 0 && d[x].is_some_and(|dx| dx as i64 <= r)
}

/// Minimum weight of an edge set that hits every triangle having an edge
/// inside `B_r(v)`, using only edges with an endpoint in the ball.
/// `g(v, r) = 0` for negative `r`.
pub fn g_value(g: &Graph, v: NodeId, r: i64, cfg: &SolverConfig) -> Result<(Weight, EdgeSet), OracleError> {
    if r < 0 {
        return Ok((Weight::zero(), EdgeSet::new()));
    }
    let d = distances(g, v);
    // every triangle of this subgraph has an edge inside the ball
    let local = g.filter_edges(|e| within(&d, e.0, r) || within(&d, e.1, r));
    let sol = tau_with(&local, cfg, &[])?;
    Ok((sol.value, sol.cover))
}

/// Step cap `2 (ceil(log_{1+eps}(m * w_max / w_min)) + 2)`; for unit weights
/// this is `2 (ceil(log_{1+eps} m) + 2)`.
pub fn step_cap(g: &Graph, eps: Weight) -> usize {
    let m = g.edge_count();
    if m == 0 {
        return 4;
    }
    let ws: Vec<Weight> = (0..m).map(|i| g.weight(i)).collect();
    let spread = (*ws.iter().max().unwrap() / *ws.iter().min().unwrap()).to_f64().unwrap_or(1.0);
    let growth = (Weight::one() + eps).to_f64().unwrap_or(2.0);
    let ratio = m as f64 * spread;
    let log = if ratio <= 1.0 { 0.0 } else { (ratio.ln() / growth.ln()).ceil() };
    2 * (log as usize + 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CarveStep {
    pub center: NodeId,
    /// Final radius `r(v)`, odd.
    pub radius: usize,
    /// `g(v, 1), g(v, 3), ..., g(v, r(v))`.
    pub values: Vec<Weight>,
    pub cover: EdgeSet,
    /// `B_{r(v)-2}(v)` in the residual graph; empty when `r(v) = 1`.
    pub region: Vec<NodeId>,
    /// Internal edges of `B_{r(v)}(v)`, removed after the step.
    pub removed: Vec<Edge>,
}

impl CarveStep {
    pub fn steps(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self) -> Weight {
        self.values.last().copied().unwrap_or_else(Weight::zero)
    }
}

/// Grow a ball at `v` in `residual`, carve it, and return the step.
fn carve_node(
    residual: &mut Graph,
    v: NodeId,
    eps: Weight,
    cap: usize,
    cfg: &SolverConfig,
) -> Result<CarveStep, ApproxError> {
    let grow = Weight::one() + eps;
    let mut prev = Weight::zero();
    let mut values = Vec::new();
    for j in 1..=cap {
        let r = 2 * j - 1;
        let (gv, cover) = g_value(residual, v, r as i64, cfg)?;
        values.push(gv);
        if gv <= grow * prev {
            let d = distances(residual, v);
            let region = (0..residual.node_count()).filter(|&x| within(&d, x, r as i64 - 2)).collect();
            let removed: Vec<Edge> = residual
                .edges()
                .iter()
                .copied()
                .filter(|e| within(&d, e.0, r as i64) && within(&d, e.1, r as i64))
                .collect();
            let gone: BTreeSet<Edge> = removed.iter().copied().collect();
            *residual = residual.filter_edges(|e| !gone.contains(&e));
            return Ok(CarveStep { center: v, radius: r, values, cover, region, removed });
        }
        prev = gv;
    }
    Err(ApproxError::StepCapExceeded { node: v, cap })
}

#[derive(Clone, Debug, Serialize)]
pub struct CarvingAudit {
    pub valid_tet: bool,
    /// Every step stopped on the first radius satisfying the growth rule.
    pub stopping_rule: bool,
    pub step_cap: usize,
    pub max_steps: usize,
    /// Nonempty regions `B_{r-2}` are pairwise disjoint.
    pub regions_disjoint: bool,
    /// With an optimum `OPT`: the sets `D_i` (optimum edges still present
    /// with an endpoint in region `i`) are disjoint and each committed cover
    /// weighs at most `(1 + eps) w(D_i)`.
    pub charging: Option<bool>,
    pub opt: Option<Weight>,
    /// `value <= (1 + eps) * opt`.
    pub ratio_holds: Option<bool>,
}

impl CarvingAudit {
    pub fn holds(&self) -> bool {
        self.valid_tet
            && self.stopping_rule
            && self.max_steps <= self.step_cap
            && self.regions_disjoint
            && self.charging != Some(false)
            && self.ratio_holds != Some(false)
    }
}

/// Check a carving run against the growth rule and the charging argument.
pub fn audit_carving(
    g: &Graph,
    eps: Weight,
    steps: &[CarveStep],
    cover: &EdgeSet,
    opt: Option<&EdgeSet>,
) -> Result<CarvingAudit, ApproxError> {
    let grow = Weight::one() + eps;
    let stopping_rule = steps.iter().all(|s| {
        let mut prev = Weight::zero();
        let last = s.values.len() - 1;
        s.values.iter().enumerate().all(|(i, &v)| {
            let ok = (v <= grow * prev) == (i == last);
            prev = v;
            ok
        }) && s.radius == 2 * s.values.len() - 1
    });
    let mut seen = BTreeSet::new();
    let regions_disjoint = steps.iter().all(|s| s.region.iter().all(|&x| seen.insert(x)));

    let mut charging = None;
    let mut opt_value = None;
    let mut ratio_holds = None;
    if let Some(opt) = opt {
        let mut residual: BTreeSet<Edge> = g.edges().iter().copied().collect();
        let mut used = BTreeSet::new();
        let mut ok = true;
        for s in steps {
            let region: BTreeSet<NodeId> = s.region.iter().copied().collect();
            let d_i: EdgeSet = opt
                .iter()
                .copied()
                .filter(|e| residual.contains(e) && (region.contains(&e.0) || region.contains(&e.1)))
                .collect();
            ok &= d_i.iter().all(|e| used.insert(*e));
            ok &= s.value() <= grow * g.weight_of(&d_i)?;
            for e in &s.removed {
                residual.remove(e);
            }
        }
        let ov = g.weight_of(opt)?;
        charging = Some(ok);
        ratio_holds = Some(g.weight_of(cover)? <= grow * ov);
        opt_value = Some(ov);
    }
    Ok(CarvingAudit {
        valid_tet: g.is_tet(cover)?,
        stopping_rule,
        step_cap: step_cap(g, eps),
        max_steps: steps.iter().map(CarveStep::steps).max().unwrap_or(0),
        regions_disjoint,
        charging,
        opt: opt_value,
        ratio_holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Carving {
    pub cover: EdgeSet,
    pub value: Weight,
    pub order: Vec<NodeId>,
    pub steps: Vec<CarveStep>,
}

fn check_eps(eps: Weight) -> Result<(), ApproxError> {
    if eps <= Weight::zero() {
        return Err(ApproxError::BadEpsilon);
    }
    Ok(())
}

/// Carve balls around the nodes of `order` in turn.
pub fn ball_carve_sequential(
    g: &Graph,
    eps: Weight,
    order: &[NodeId],
    cfg: &SolverConfig,
) -> Result<Carving, ApproxError> {
    check_eps(eps)?;
    let cap = step_cap(g, eps);
    let mut residual = g.clone();
    let mut cover = EdgeSet::new();
    let mut steps = Vec::with_capacity(order.len());
    for &v in order {
        let s = carve_node(&mut residual, v, eps, cap, cfg)?;
        cover.extend(s.cover.iter().copied());
        steps.push(s);
    }
    if !g.is_tet(&cover)? {
        return Err(ApproxError::InvalidCover);
    }
    Ok(Carving { value: g.weight_of(&cover)?, cover, order: order.to_vec(), steps })
}

/// Neighbourhoods in `G^power`.
pub fn power_adjacency(g: &Graph, power: usize) -> Vec<Vec<NodeId>> {
    (0..g.node_count())
        .map(|v| {
            g.bfs(v)
                .iter()
                .enumerate()
                .filter(|&(u, d)| u != v && d.is_some_and(|d| d <= power))
                .map(|(u, _)| u)
                .collect()
        })
        .collect()
}

fn all_distances(adj: &[Vec<NodeId>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    (0..n)
        .map(|s| {
            let mut d = vec![usize::MAX; n];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if d[y] == usize::MAX {
                        d[y] = d[x] + 1;
                        q.push_back(y);
                    }
                }
            }
            d
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    /// Power of the graph the decomposition is for.
    pub power: usize,
    pub cluster: Vec<usize>,
    /// Colour of each cluster.
    pub color: Vec<usize>,
    /// Members of each cluster, ascending.
    pub members: Vec<Vec<NodeId>>,
    /// Number of colours.
    pub c: usize,
    /// Largest weak diameter, in hops of `G^power`.
    pub d: usize,
    /// Shifted-clustering attempts that produced no interior node.
    pub retries: usize,
    /// Rounds a distributed implementation would spend, estimated from the
    /// largest shift of every attempt.
    pub rounds_estimate: usize,
}

impl Decomposition {
    pub fn color_of(&self, v: NodeId) -> usize {
        self.color[self.cluster[v]]
    }

    /// Nodes sorted by (colour, id).
    pub fn order(&self) -> Vec<NodeId> {
        let mut o: Vec<NodeId> = (0..self.cluster.len()).collect();
        o.sort_by_key(|&v| (self.color_of(v), v));
        o
    }
}

/// Rate of the exponential shifts.
const SHIFT_RATE: f64 = 0.5;

/// Colour classes of low-diameter clusters of `G^power`. Each pass takes
/// every remaining component of small weak diameter whole, clusters the
/// rest by exponentially shifted distances, and colours the clusters'
/// interior nodes (those whose remaining power-neighbours share their
/// cluster).
pub fn network_decomposition(g: &Graph, power: usize, seed: u64) -> Decomposition {
    let n = g.node_count();
    let adj = power_adjacency(g, power);
    let dist = all_distances(&adj);
    let small = id_bits(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining: BTreeSet<NodeId> = (0..n).collect();
    let mut cluster = vec![usize::MAX; n];
    let mut color = Vec::new();
    let mut members: Vec<Vec<NodeId>> = Vec::new();
    let mut retries = 0;
    let mut rounds = 0;
    let mut c = 0;

    while !remaining.is_empty() {
        let mut progressed = false;
        // whole components first
        let mut seen = BTreeSet::new();
        for &s in &remaining {
            if seen.contains(&s) {
                continue;
            }
            let mut comp = vec![s];
            seen.insert(s);
            let mut i = 0;
            while i < comp.len() {
                for &y in &adj[comp[i]] {
                    if remaining.contains(&y) && seen.insert(y) {
                        comp.push(y);
                    }
                }
                i += 1;
            }
            let diam = comp.iter().flat_map(|&a| comp.iter().map(move |&b| (a, b))).map(|(a, b)| dist[a][b]).max();
            if diam.is_some_and(|d| d <= small) {
                comp.sort_unstable();
                for &x in &comp {
                    cluster[x] = members.len();
                }
                members.push(comp);
                color.push(c);
                progressed = true;
            }
        }
        let rest: Vec<NodeId> = remaining.iter().copied().filter(|&x| cluster[x] == usize::MAX).collect();
        rounds += power * (small + 1);
        if !rest.is_empty() {
            let in_rest: BTreeSet<NodeId> = rest.iter().copied().collect();
            let shift: BTreeMap<NodeId, f64> =
                rest.iter().map(|&u| (u, -(1.0 - rng.random::<f64>()).ln() / SHIFT_RATE)).collect();
            let max_shift = shift.values().cloned().fold(0.0, f64::max);
            rounds += power * (max_shift.ceil() as usize + 1);
            // best (shift - distance, then smaller center) within the remaining subgraph
            let mut best: BTreeMap<NodeId, (f64, NodeId)> = BTreeMap::new();
            for &u in &rest {
                let reach = shift[&u].floor() as usize;
                let mut d = BTreeMap::from([(u, 0usize)]);
                let mut q = VecDeque::from([u]);
                while let Some(x) = q.pop_front() {
                    let val = shift[&u] - d[&x] as f64;
                    let better = match best.get(&x) {
                        None => true,
                        Some(&(bv, bc)) => val > bv || (val == bv && u < bc),
                    };
                    if better {
                        best.insert(x, (val, u));
                    }
                    if d[&x] == reach {
                        continue;
                    }
                    for &y in &adj[x] {
                        if in_rest.contains(&y) && !d.contains_key(&y) {
                            d.insert(y, d[&x] + 1);
                            q.push_back(y);
                        }
                    }
                }
            }
            let mut groups: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
            for &x in &rest {
                let cx = best[&x].1;
                if adj[x].iter().filter(|y| in_rest.contains(y)).all(|y| best[y].1 == cx) {
                    groups.entry(cx).or_default().push(x);
                }
            }
            for (_, g) in groups {
                for &x in &g {
                    cluster[x] = members.len();
                }
                members.push(g);
                color.push(c);
                progressed = true;
            }
        }
        if progressed {
            remaining.retain(|&x| cluster[x] == usize::MAX);
            c += 1;
        } else {
            retries += 1;
        }
    }
    let d = members
        .iter()
        .map(|m| m.iter().flat_map(|&a| m.iter().map(move |&b| (a, b))).map(|(a, b)| dist[a][b]).max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    Decomposition { power, cluster, color, members, c, d, retries, rounds_estimate: rounds }
}

/// Every node in one cluster, clusters adjacent in `G^power` coloured
/// differently, and the recorded `d` at least every weak diameter.
pub fn validate_decomposition(g: &Graph, dec: &Decomposition) -> Result<(), String> {
    let n = g.node_count();
    if dec.cluster.len() != n {
        return Err("cluster vector has the wrong length".into());
    }
    for (k, m) in dec.members.iter().enumerate() {
        if m.iter().any(|&x| dec.cluster[x] != k) {
            return Err(format!("cluster {k} member list disagrees with assignment"));
        }
    }
    if dec.members.iter().map(Vec::len).sum::<usize>() != n {
        return Err("members do not partition the nodes".into());
    }
    let adj = power_adjacency(g, dec.power);
    for x in 0..n {
        for &y in &adj[x] {
            if dec.cluster[x] != dec.cluster[y] && dec.color_of(x) == dec.color_of(y) {
                return Err(format!("adjacent clusters of nodes {x} and {y} share colour {}", dec.color_of(x)));
            }
        }
    }
    let dist = all_distances(&adj);
    for m in &dec.members {
        for &a in m {
            for &b in m {
                if dist[a][b] > dec.d {
                    return Err(format!("nodes {a} and {b} are {} apart, beyond d = {}", dist[a][b], dec.d));
                }
            }
        }
    }
    if dec.color.iter().any(|&c| c >= dec.c) {
        return Err("colour out of range".into());
    }
    Ok(())
}

/// Largest radius a ball may reach.
pub fn radius_cap(g: &Graph, eps: Weight) -> usize {
    (2 * step_cap(g, eps) - 1).min(g.node_count() + 1)
}

/// Power for which same-coloured clusters carve independently: their
/// members are more than `2 (radius_cap + 1)` apart.
pub fn independence_power(g: &Graph, eps: Weight) -> usize {
    2 * (radius_cap(g, eps) + 1) + 1
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundReport {
    /// Estimated rounds to build the decomposition.
    pub decomposition: usize,
    pub phases: usize,
    /// Flooding rounds per gather or disseminate step.
    pub flood: usize,
    /// Simulated rounds of the carving phases.
    pub measured: usize,
    pub total: usize,
    /// `c * 2 * flood + decomposition`.
    pub bound: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributedCarving {
    pub carving: Carving,
    pub decomposition: Decomposition,
    pub rounds: RoundReport,
    pub max_edge_bits: usize,
}

struct CarvingProgram<'a> {
    eps: Weight,
    weighted: bool,
    cap: usize,
    flood: usize,
    dec: &'a Decomposition,
    cfg: SolverConfig,
}

#[derive(Clone, Debug, Hash)]
struct CarvingState {
    residual: BTreeMap<NodeId, Weight>,
    known: BTreeMap<Edge, Weight>,
    fresh: Vec<(Edge, Weight)>,
    facts: BTreeSet<(bool, Edge)>,
    fresh_facts: Vec<(bool, Edge)>,
    cover: BTreeSet<Edge>,
    steps: Vec<CarveStep>,
    fault: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
struct CarvingOutput {
    cover: Vec<Edge>,
    steps: Vec<CarveStep>,
}

impl CarvingProgram<'_> {
    fn leader_of(&self, v: NodeId) -> bool {
        self.dec.members[self.dec.cluster[v]][0] == v
    }

    /// Run the template on the cluster's members against the gathered view.
    fn lead(&self, ctx: &NodeCtx, s: &mut CarvingState) -> Result<(), ApproxError> {
        let edges: Vec<(NodeId, NodeId, Weight)> = s.known.iter().map(|(e, w)| (e.0, e.1, *w)).collect();
        let mut view = if self.weighted {
            Graph::with_weights(ctx.n, edges)?
        } else {
            Graph::new(ctx.n, edges.iter().map(|&(u, v, _)| (u, v)))?
        };
        for &v in &self.dec.members[self.dec.cluster[ctx.id]] {
            let step = carve_node(&mut view, v, self.eps, self.cap, &self.cfg)?;
            for e in &step.removed {
                s.facts.insert((false, *e));
            }
            for e in step.cover.iter() {
                s.facts.insert((true, *e));
            }
            s.steps.push(step);
        }
        s.fresh_facts = s.facts.iter().copied().collect();
        Ok(())
    }

    fn apply_facts(ctx: &NodeCtx, s: &mut CarvingState) {
        for &(is_cover, e) in &s.facts {
            if let Some(other) = e.other(ctx.id) {
                if is_cover {
                    s.cover.insert(e);
                } else {
                    s.residual.remove(&other);
                }
            }
        }
    }
}

fn encode_edges(n: usize, items: &[(Edge, Weight)]) -> Payload {
    let b = id_bits(n);
    let mut w = BitWriter::new();
    w.put(items.len() as u64, 32);
    for (e, wt) in items {
        w.put(e.0 as u64, b).put(e.1 as u64, b).put(*wt.numer() as u64, 64).put(*wt.denom() as u64, 64);
    }
    w.finish()
}

fn decode_edges(n: usize, p: &Payload) -> Result<Vec<(Edge, Weight)>, SimError> {
    let b = id_bits(n);
    let mut r = BitReader::new(p);
    let k = r.get(32)?;
    (0..k)
        .map(|_| {
            let (u, v) = (r.get(b)? as usize, r.get(b)? as usize);
            let (num, den) = (r.get(64)? as i64, r.get(64)? as i64);
            Ok((Edge::new(u, v), Weight::new(num, den)))
        })
        .collect()
}

fn encode_facts(n: usize, items: &[(bool, Edge)]) -> Payload {
    let b = id_bits(n);
    let mut w = BitWriter::new();
    w.put(items.len() as u64, 32);
    for (c, e) in items {
        w.put_bit(*c).put(e.0 as u64, b).put(e.1 as u64, b);
    }
    w.finish()
}

fn decode_facts(n: usize, p: &Payload) -> Result<Vec<(bool, Edge)>, SimError> {
    let b = id_bits(n);
    let mut r = BitReader::new(p);
    let k = r.get(32)?;
    (0..k).map(|_| Ok((r.get_bit()?, Edge::new(r.get(b)? as usize, r.get(b)? as usize)))).collect()
}

impl NodeProgram for CarvingProgram<'_> {
    type State = CarvingState;
    type Output = CarvingOutput;

    fn init(&self, ctx: &NodeCtx) -> CarvingState {
        CarvingState {
            residual: ctx.neighbors.iter().copied().zip(ctx.weights.iter().copied()).collect(),
            known: BTreeMap::new(),
            fresh: Vec::new(),
            facts: BTreeSet::new(),
            fresh_facts: Vec::new(),
            cover: BTreeSet::new(),
            steps: Vec::new(),
            fault: None,
        }
    }

    fn send(&self, ctx: &NodeCtx, s: &mut CarvingState, round: usize, _rng: &mut NodeRng) -> Vec<Option<Payload>> {
        let step = (round - 1) % (2 * self.flood);
        if step == 0 {
            s.known = s.residual.iter().map(|(&u, &w)| (Edge::new(ctx.id, u), w)).collect();
            s.fresh = s.known.iter().map(|(e, w)| (*e, *w)).collect();
        }
        let msg = if step < self.flood {
            if s.fresh.is_empty() {
                return Vec::new();
            }
            encode_edges(ctx.n, &std::mem::take(&mut s.fresh))
        } else {
            if s.fresh_facts.is_empty() {
                return Vec::new();
            }
            encode_facts(ctx.n, &std::mem::take(&mut s.fresh_facts))
        };
        vec![Some(msg); ctx.degree()]
    }

    fn receive(
        &self,
        ctx: &NodeCtx,
        s: &mut CarvingState,
        round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<bool, SimError> {
        let phase = (round - 1) / (2 * self.flood);
        let step = (round - 1) % (2 * self.flood);
        if step < self.flood {
            for m in inbox.iter().flatten() {
                for (e, w) in decode_edges(ctx.n, m)? {
                    if s.known.insert(e, w).is_none() {
                        s.fresh.push((e, w));
                    }
                }
            }
            if step + 1 == self.flood && self.leader_of(ctx.id) && self.dec.color_of(ctx.id) == phase {
                if let Err(e) = self.lead(ctx, s) {
                    s.fault = Some(e.to_string());
                    return Err(SimError::Model(format!("leader {}: {e}", ctx.id)));
                }
            }
            return Ok(false);
        }
        for m in inbox.iter().flatten() {
            for f in decode_facts(ctx.n, m)? {
                if s.facts.insert(f) {
                    s.fresh_facts.push(f);
                }
            }
        }
        if step + 1 < 2 * self.flood {
            return Ok(false);
        }
        Self::apply_facts(ctx, s);
        s.facts.clear();
        s.fresh_facts.clear();
        s.known.clear();
        Ok(phase + 1 == self.dec.c)
    }

    fn output(&self, _ctx: &NodeCtx, s: &CarvingState) -> CarvingOutput {
        CarvingOutput { cover: s.cover.iter().copied().collect(), steps: s.steps.clone() }
    }
}

/// Ball carving scheduled by a network decomposition and executed on the
/// simulator: per colour, cluster leaders gather the residual topology,
/// carve their members in id order, and flood the result back.
pub fn ball_carve_distributed(
    g: &Graph,
    eps: Weight,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<DistributedCarving, ApproxError> {
    check_eps(eps)?;
    let power = independence_power(g, eps);
    let dec = network_decomposition(g, power, seed);
    let flood = dec.d * power + radius_cap(g, eps) + 2;
    let prog = CarvingProgram { eps, weighted: g.is_weighted(), cap: step_cap(g, eps), flood, dec: &dec, cfg: cfg.clone() };
    let opts = RunOptions { record_messages: false, record_state_hashes: false };
    let run = run_with(g, &prog, SimModel::local(), seed, 2 * flood * dec.c, opts)?;

    let order = dec.order();
    let rank: BTreeMap<NodeId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut steps: Vec<CarveStep> = run.outputs.iter().flat_map(|o| o.steps.iter().cloned()).collect();
    steps.sort_by_key(|s| rank[&s.center]);
    let mut cover = EdgeSet::new();
    for o in &run.outputs {
        cover.extend(o.cover.iter().copied());
    }
    if steps.len() != g.node_count() || !g.is_tet(&cover)? {
        return Err(ApproxError::InvalidCover);
    }
    let measured = run.transcript.rounds;
    let rounds = RoundReport {
        decomposition: dec.rounds_estimate,
        phases: dec.c,
        flood,
        measured,
        total: measured + dec.rounds_estimate,
        bound: dec.c * 2 * flood + dec.rounds_estimate,
    };
    Ok(DistributedCarving {
        carving: Carving { value: g.weight_of(&cover)?, cover, order, steps },
        rounds,
        max_edge_bits: run.transcript.max_edge_bits,
        decomposition: dec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::tau;

    fn half() -> Weight {
        Weight::new(1, 2)
    }

    #[test]
    fn g_value_examples() {
        let cfg = SolverConfig::default();
        let k4 = Graph::complete(4);
        assert_eq!(g_value(&k4, 0, 1, &cfg).unwrap().0, Weight::from(2));
        let two = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(g_value(&two, 0, 1, &cfg).unwrap().0, Weight::from(1));
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g_value(&path, 1, 3, &cfg).unwrap().0, Weight::from(0));
        assert_eq!(g_value(&k4, 0, -1, &cfg).unwrap().0, Weight::from(0));
    }

    #[test]
    fn carving_k4() {
        let k4 = Graph::complete(4);
        let c = ball_carve_sequential(&k4, half(), &[0, 1, 2, 3], &SolverConfig::default()).unwrap();
        assert_eq!(c.value, Weight::from(2));
        let opt = tau(&k4).unwrap().cover;
        let a = audit_carving(&k4, half(), &c.steps, &c.cover, Some(&opt)).unwrap();
        assert!(a.holds(), "{a:?}");
    }

    #[test]
    fn decomposition_examples() {
        let single = Graph::new(1, []).unwrap();
        let d = network_decomposition(&single, 1, 0);
        assert_eq!((d.members.len(), d.c, d.d), (1, 1, 0));
        let mut pairs = Vec::new();
        for base in [0, 4] {
            for u in 0..4 {
                for v in u + 1..4 {
                    pairs.push((base + u, base + v));
                }
            }
        }
        let g = Graph::new(8, pairs).unwrap();
        let d = network_decomposition(&g, 1, 3);
        validate_decomposition(&g, &d).unwrap();
        assert_eq!((d.members.len(), d.c), (2, 1));
    }

    #[test]
    fn distributed_matches_sequential_on_two_k4() {
        let mut pairs = Vec::new();
        for base in [0, 4] {
            for u in 0..4 {
                for v in u + 1..4 {
                    pairs.push((base + u, base + v));
                }
            }
        }
        let g = Graph::new(8, pairs).unwrap();
        let cfg = SolverConfig::default();
        let dist = ball_carve_distributed(&g, half(), 1, &cfg).unwrap();
        assert_eq!(dist.carving.value, Weight::from(4));
        let seq = ball_carve_sequential(&g, half(), &dist.carving.order, &cfg).unwrap();
        assert_eq!(seq.cover, dist.carving.cover);
        assert_eq!(seq.steps, dist.carving.steps);
    }
}
