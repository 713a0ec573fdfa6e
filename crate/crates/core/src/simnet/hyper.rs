//! Hypergraph programs, run directly on a hypergraph or simulated on the
//! graph whose triangle hypergraph it is.
//!
//! In the simulation, the hypergraph node of edge `{u,w}` is run by both
//! `u` and `w`, and the hyperedge of triangle `{a,b,c}` by all three corners.
//! Every simulator keeps a hash chain over the entity's messages and state;
//! all copies of an entity must agree after every simulated round.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::Serialize;

use super::bits::{fragment, id_bits, value_bits, BitReader, BitWriter, Payload};
use super::programs::{list_exchange_rounds, local_triangles, ListExchange};
use super::{hash_of, run_with, NodeCtx, NodeProgram, NodeRng, RunOptions, SimModel, Transcript};
use crate::error::SimError;
use crate::graph::{Edge, Graph, Hypergraph, NodeId, ReducedHypergraph, Triangle, Weight};

const NODE_TAG: u64 = 1;
const EDGE_TAG: u64 = 2;

/// Behaviour of hypergraph nodes and hyperedges. Entities are named by ids
/// whose order is the same in every execution.
pub trait HyperProgram: Sync {
    type NodeState: Clone + Hash + Send + Sync;
    type EdgeState: Clone + Hash + Send + Sync;
    type NodeOutput: Clone + Debug + PartialEq + Serialize + Send + Sync;
    type EdgeOutput: Clone + Debug + PartialEq + Serialize + Send + Sync;

    /// Upper bound on any node-to-hyperedge message.
    fn max_message_bits(&self) -> usize;

    /// `hyperedges` lists the ids of the incident hyperedges, ascending.
    fn node_init(&self, id: u64, weight: Weight, hyperedges: &[u64]) -> Self::NodeState;

    /// `members` lists the member node ids, ascending.
    fn edge_init(&self, id: u64, members: &[u64]) -> Self::EdgeState;

    /// One optional message per incident hyperedge, or empty for silence.
    fn node_send(&self, s: &mut Self::NodeState, round: usize, rng: &mut NodeRng) -> Vec<Option<Payload>>;

    /// Replies (one per member, or empty) and whether the hyperedge halts.
    fn edge_step(
        &self,
        s: &mut Self::EdgeState,
        round: usize,
        inbox: &[Option<Payload>],
        rng: &mut NodeRng,
    ) -> Result<(Vec<Option<Payload>>, bool), SimError>;

    /// Returns whether the node halts.
    fn node_receive(
        &self,
        s: &mut Self::NodeState,
        round: usize,
        inbox: &[Option<Payload>],
        rng: &mut NodeRng,
    ) -> Result<bool, SimError>;

    fn node_output(&self, s: &Self::NodeState) -> Self::NodeOutput;
    fn edge_output(&self, s: &Self::EdgeState) -> Self::EdgeOutput;
}

/// Id of the hypergraph node for graph edge `e` on `n` nodes.
pub fn edge_id(e: Edge, n: usize) -> u64 {
    (e.0 * n + e.1) as u64
}

/// Id of the hyperedge for triangle `t` on `n` nodes.
pub fn triangle_id(t: Triangle, n: usize) -> u64 {
    let [a, b, c] = t.0;
    ((a * n + b) * n + c) as u64
}

fn pad(mut v: Vec<Option<Payload>>, len: usize) -> Result<Vec<Option<Payload>>, SimError> {
    if v.is_empty() {
        v = vec![None; len];
    }
    if v.len() != len {
        return Err(SimError::Model(format!("{} messages for {len} slots", v.len())));
    }
    Ok(v)
}

fn chain<S: Hash>(
    info: &mut Vec<u64>,
    round: usize,
    sent: &[Option<Payload>],
    received: &[Option<Payload>],
    state: &S,
    rng: &NodeRng,
) {
    let prev = info.last().copied().unwrap_or(0);
    info.push(hash_of(&(prev, round, sent, received, hash_of(state), rng)));
}

#[derive(Clone, Debug, Serialize)]
pub struct HyperRun<NO, EO> {
    pub rounds: usize,
    pub node_outputs: Vec<NO>,
    pub edge_outputs: Vec<EO>,
    /// Per entity, one essential-information hash per round it was active.
    pub node_info: Vec<Vec<u64>>,
    pub edge_info: Vec<Vec<u64>>,
    pub messages: usize,
}

/// Reference execution on the hypergraph itself. `node_ids` and `edge_ids`
/// name the entities and must be ascending.
pub fn direct_run<P: HyperProgram>(
    h: &Hypergraph,
    node_ids: &[u64],
    edge_ids: &[u64],
    prog: &P,
    seed: u64,
    max_rounds: usize,
) -> Result<HyperRun<P::NodeOutput, P::EdgeOutput>, SimError> {
    let nn = h.node_count();
    let ne = h.hyperedges().len();
    assert_eq!(node_ids.len(), nn);
    assert_eq!(edge_ids.len(), ne);
    let mut ns: Vec<P::NodeState> = (0..nn)
        .map(|v| {
            let inc: Vec<u64> = h.incident(v).iter().map(|&j| edge_ids[j]).collect();
            prog.node_init(node_ids[v], h.weight(v), &inc)
        })
        .collect();
    let mut es: Vec<P::EdgeState> = (0..ne)
        .map(|j| {
            let mem: Vec<u64> = h.hyperedges()[j].iter().map(|&v| node_ids[v]).collect();
            prog.edge_init(edge_ids[j], &mem)
        })
        .collect();
    let mut nrng: Vec<NodeRng> = node_ids.iter().map(|&id| NodeRng::derive(seed, NODE_TAG, id)).collect();
    let mut erng: Vec<NodeRng> = edge_ids.iter().map(|&id| NodeRng::derive(seed, EDGE_TAG, id)).collect();
    let mut n_active = vec![true; nn];
    let mut e_active = vec![true; ne];
    let mut node_info = vec![Vec::new(); nn];
    let mut edge_info = vec![Vec::new(); ne];
    let mut rounds = 0;
    let mut messages = 0;

    while n_active.iter().any(|&a| a) || e_active.iter().any(|&a| a) {
        if rounds == max_rounds {
            return Err(SimError::Timeout { rounds: max_rounds, partial: None });
        }
        rounds += 1;
        let round = rounds;
        let mut up: Vec<Vec<Option<Payload>>> = vec![Vec::new(); nn];
        for v in 0..nn {
            if n_active[v] {
                up[v] = pad(prog.node_send(&mut ns[v], round, &mut nrng[v]), h.incident(v).len())?;
                messages += up[v].iter().flatten().count();
            }
        }
        let mut down: Vec<Vec<Option<Payload>>> = vec![Vec::new(); ne];
        let mut e_halt = vec![false; ne];
        for j in 0..ne {
            if !e_active[j] {
                continue;
            }
            let members = &h.hyperedges()[j];
            let inbox: Vec<Option<Payload>> = members
                .iter()
                .map(|&v| {
                    let pos = h.incident(v).binary_search(&j).expect("incidence is consistent");
                    up[v].get(pos).cloned().flatten()
                })
                .collect();
            let (replies, halt) = prog.edge_step(&mut es[j], round, &inbox, &mut erng[j])?;
            down[j] = pad(replies, members.len())?;
            e_halt[j] = halt;
            chain(&mut edge_info[j], round, &inbox, &down[j], &es[j], &erng[j]);
        }
        for v in 0..nn {
            if !n_active[v] {
                continue;
            }
            let inbox: Vec<Option<Payload>> = h
                .incident(v)
                .iter()
                .map(|&j| {
                    let pos = h.hyperedges()[j].binary_search(&v).expect("incidence is consistent");
                    down[j].get(pos).cloned().flatten()
                })
                .collect();
            let halt = prog.node_receive(&mut ns[v], round, &inbox, &mut nrng[v])?;
            chain(&mut node_info[v], round, &up[v], &inbox, &ns[v], &nrng[v]);
            if halt {
                n_active[v] = false;
            }
        }
        for j in 0..ne {
            if e_halt[j] {
                e_active[j] = false;
            }
        }
    }
    Ok(HyperRun {
        rounds,
        node_outputs: ns.iter().map(|s| prog.node_output(s)).collect(),
        edge_outputs: es.iter().map(|s| prog.edge_output(s)).collect(),
        node_info,
        edge_info,
        messages,
    })
}

/// Direct execution with entity ids equal to indices.
pub fn direct_run_plain<P: HyperProgram>(
    h: &Hypergraph,
    prog: &P,
    seed: u64,
    max_rounds: usize,
) -> Result<HyperRun<P::NodeOutput, P::EdgeOutput>, SimError> {
    let nid: Vec<u64> = (0..h.node_count() as u64).collect();
    let eid: Vec<u64> = (0..h.hyperedges().len() as u64).collect();
    direct_run(h, &nid, &eid, prog, seed, max_rounds)
}

/// Direct execution on a triangle hypergraph with the ids the graph
/// simulation uses, so both runs draw the same randomness.
pub fn direct_run_hypergraph<P: HyperProgram>(
    rh: &ReducedHypergraph,
    n: usize,
    prog: &P,
    seed: u64,
    max_rounds: usize,
) -> Result<HyperRun<P::NodeOutput, P::EdgeOutput>, SimError> {
    let nid: Vec<u64> = rh.edges.iter().map(|&e| edge_id(e, n)).collect();
    let eid: Vec<u64> = rh.triangles.iter().map(|&t| triangle_id(t, n)).collect();
    direct_run(&rh.hypergraph, &nid, &eid, prog, seed, max_rounds)
}

#[derive(Clone, Debug, Hash)]
struct NodeEntity<S> {
    key: Edge,
    hyperedges: Vec<Triangle>,
    state: S,
    rng: NodeRng,
    active: bool,
    sent: Vec<Option<Payload>>,
    info: Vec<u64>,
}

#[derive(Clone, Debug, Hash)]
struct EdgeEntity<S> {
    key: Triangle,
    state: S,
    rng: NodeRng,
    active: bool,
    info: Vec<u64>,
}

#[derive(Clone, Debug, Hash)]
pub struct SimulatorState<NS, ES> {
    exchange: ListExchange,
    nodes: Vec<NodeEntity<NS>>,
    edges: Vec<EdgeEntity<ES>>,
    outbound: Vec<Vec<Payload>>,
    inbound: Vec<Payload>,
    sim_rounds: usize,
    fault: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulatorOutput<NO, EO> {
    pub nodes: Vec<(Edge, NO, Vec<u64>)>,
    pub edges: Vec<(Triangle, EO, Vec<u64>)>,
    pub sim_rounds: usize,
}

/// Graph-level program that runs a hypergraph program on the triangle
/// hypergraph of the graph.
pub struct Simulator<'p, P> {
    prog: &'p P,
    seed: u64,
    setup_rounds: usize,
    slots: usize,
    id_bits: usize,
    len_bits: usize,
}

impl<'p, P: HyperProgram> Simulator<'p, P> {
    pub fn new(prog: &'p P, seed: u64, n: usize, max_degree: usize, bandwidth: Option<usize>) -> Self {
        let idb = id_bits(n);
        let max_bits = prog.max_message_bits();
        let len_bits = value_bits(max_bits as u64);
        let stream = idb + max_degree.saturating_sub(1) * (idb + len_bits + max_bits);
        let slots = match bandwidth {
            None => 1,
            Some(b) => stream.div_ceil(b).max(1),
        };
        Simulator {
            prog,
            seed,
            setup_rounds: list_exchange_rounds(n, max_degree, bandwidth),
            slots,
            id_bits: idb,
            len_bits,
        }
    }

    /// Graph rounds spent on triangle discovery.
    pub fn setup_rounds(&self) -> usize {
        self.setup_rounds
    }

    /// Graph rounds per simulated round.
    pub fn slots(&self) -> usize {
        self.slots
    }

    fn build_entities(&self, ctx: &NodeCtx, s: &mut SimulatorState<P::NodeState, P::EdgeState>) -> Result<(), SimError> {
        let lists = s
            .exchange
            .lists()
            .ok_or_else(|| SimError::Decode(format!("node {}: neighbour lists incomplete", ctx.id)))?;
        let triangles = local_triangles(ctx, &lists);
        for (port, &w) in ctx.neighbors.iter().enumerate() {
            let key = Edge::new(ctx.id, w);
            let hyperedges: Vec<Triangle> = triangles.iter().copied().filter(|t| t.contains(w)).collect();
            let ids: Vec<u64> = hyperedges.iter().map(|&t| triangle_id(t, ctx.n)).collect();
            let id = edge_id(key, ctx.n);
            s.nodes.push(NodeEntity {
                key,
                state: self.prog.node_init(id, ctx.weights[port], &ids),
                hyperedges,
                rng: NodeRng::derive(self.seed, NODE_TAG, id),
                active: true,
                sent: Vec::new(),
                info: Vec::new(),
            });
        }
        for t in triangles {
            let id = triangle_id(t, ctx.n);
            let members: Vec<u64> = t.edges().iter().map(|&e| edge_id(e, ctx.n)).collect();
            s.edges.push(EdgeEntity {
                key: t,
                state: self.prog.edge_init(id, &members),
                rng: NodeRng::derive(self.seed, EDGE_TAG, id),
                active: true,
                info: Vec::new(),
            });
        }
        Ok(())
    }

    /// Compute this round's node-to-hyperedge messages and pack, for each
    /// neighbour `z`, those addressed to triangles through `z`.
    fn prepare_streams(&self, ctx: &NodeCtx, s: &mut SimulatorState<P::NodeState, P::EdgeState>, round: usize) {
        let max_bits = self.prog.max_message_bits();
        for ent in s.nodes.iter_mut().filter(|e| e.active) {
            let sent = self.prog.node_send(&mut ent.state, round, &mut ent.rng);
            match pad(sent, ent.hyperedges.len()) {
                Ok(v) => ent.sent = v,
                Err(e) => s.fault = Some(format!("entity {}: {e}", ent.key)),
            }
        }
        s.outbound = vec![Vec::new(); ctx.degree()];
        for (port, &z) in ctx.neighbors.iter().enumerate() {
            let mut entries = Vec::new();
            for ent in s.nodes.iter().filter(|e| e.active) {
                let w = ent.key.other(ctx.id).expect("entity edge is incident");
                if w == z {
                    continue;
                }
                for (k, t) in ent.hyperedges.iter().enumerate() {
                    if let (true, Some(m)) = (t.contains(z), &ent.sent[k]) {
                        entries.push((w, m));
                    }
                }
            }
            if entries.is_empty() {
                continue;
            }
            let mut wr = BitWriter::new();
            wr.put(entries.len() as u64, self.id_bits);
            for (w, m) in entries {
                if m.len() > max_bits {
                    s.fault = Some(format!("message of {} bits exceeds declared {max_bits}", m.len()));
                    return;
                }
                wr.put(w as u64, self.id_bits).put(m.len() as u64, self.len_bits).put_bits(m);
            }
            let stream = wr.finish();
            s.outbound[port] = match ctx.bandwidth {
                None => vec![stream],
                Some(b) => fragment(&stream, b),
            };
        }
    }

    fn simulate_round(
        &self,
        ctx: &NodeCtx,
        s: &mut SimulatorState<P::NodeState, P::EdgeState>,
        round: usize,
    ) -> Result<(), SimError> {
        // (sender z, w) -> message of node {z,w} to triangle {z,w,me}
        let mut received: BTreeMap<(NodeId, NodeId), Payload> = BTreeMap::new();
        for (port, &z) in ctx.neighbors.iter().enumerate() {
            let buf = std::mem::take(&mut s.inbound[port]);
            if buf.is_empty() {
                continue;
            }
            let mut r = BitReader::new(&buf);
            let count = r.get(self.id_bits)?;
            for _ in 0..count {
                let w = r.get(self.id_bits)? as NodeId;
                let len = r.get(self.len_bits)? as usize;
                received.insert((z, w), r.take(len)?);
            }
        }

        let mut replies: BTreeMap<Triangle, Vec<Option<Payload>>> = BTreeMap::new();
        let mut halting = Vec::new();
        for ei in 0..s.edges.len() {
            if !s.edges[ei].active {
                continue;
            }
            let t = s.edges[ei].key;
            let mut inbox = Vec::with_capacity(3);
            for e in t.edges() {
                if e.contains(ctx.id) {
                    let ent = s.nodes.iter().find(|x| x.key == e).expect("incident entity exists");
                    let msg = if ent.active {
                        let k = ent.hyperedges.binary_search(&t).expect("triangle is incident");
                        ent.sent[k].clone()
                    } else {
                        None
                    };
                    inbox.push(msg);
                } else {
                    let a = received.get(&(e.0, e.1));
                    let b = received.get(&(e.1, e.0));
                    if a != b {
                        return Err(SimError::Incoherent { round, entity: format!("node {e}") });
                    }
                    inbox.push(a.cloned());
                }
            }
            let ent = &mut s.edges[ei];
            let (out, halt) = self.prog.edge_step(&mut ent.state, round, &inbox, &mut ent.rng)?;
            let out = pad(out, 3)?;
            chain(&mut ent.info, round, &inbox, &out, &ent.state, &ent.rng);
            replies.insert(t, out);
            if halt {
                halting.push(ei);
            }
        }
        for ent in s.nodes.iter_mut().filter(|e| e.active) {
            let inbox: Vec<Option<Payload>> = ent
                .hyperedges
                .iter()
                .map(|t| {
                    let pos = t.edges().iter().position(|&e| e == ent.key).expect("edge of triangle");
                    replies.get(t).and_then(|r| r[pos].clone())
                })
                .collect();
            let halt = self.prog.node_receive(&mut ent.state, round, &inbox, &mut ent.rng)?;
            chain(&mut ent.info, round, &ent.sent, &inbox, &ent.state, &ent.rng);
            ent.sent.clear();
            if halt {
                ent.active = false;
            }
        }
        for ei in halting {
            s.edges[ei].active = false;
        }
        s.sim_rounds = round;
        Ok(())
    }

    fn all_halted(s: &SimulatorState<P::NodeState, P::EdgeState>) -> bool {
        s.nodes.iter().all(|e| !e.active) && s.edges.iter().all(|e| !e.active)
    }
}

impl<P: HyperProgram> NodeProgram for Simulator<'_, P> {
    type State = SimulatorState<P::NodeState, P::EdgeState>;
    type Output = SimulatorOutput<P::NodeOutput, P::EdgeOutput>;

    fn init(&self, ctx: &NodeCtx) -> Self::State {
        SimulatorState {
            exchange: ListExchange::new(ctx),
            nodes: Vec::new(),
            edges: Vec::new(),
            outbound: Vec::new(),
            inbound: vec![Payload::new(); ctx.degree()],
            sim_rounds: 0,
            fault: None,
        }
    }

    fn send(&self, ctx: &NodeCtx, s: &mut Self::State, round: usize, _rng: &mut NodeRng) -> Vec<Option<Payload>> {
        if round <= self.setup_rounds {
            return s.exchange.send(ctx);
        }
        let k = round - self.setup_rounds - 1;
        let slot = k % self.slots;
        if slot == 0 {
            self.prepare_streams(ctx, s, k / self.slots + 1);
        }
        if s.outbound.iter().all(|f| f.len() <= slot) {
            return Vec::new();
        }
        s.outbound.iter().map(|f| f.get(slot).cloned()).collect()
    }

    fn receive(
        &self,
        ctx: &NodeCtx,
        s: &mut Self::State,
        round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<bool, SimError> {
        if let Some(f) = &s.fault {
            return Err(SimError::Model(format!("node {}: {f}", ctx.id)));
        }
        if round <= self.setup_rounds {
            s.exchange.absorb(ctx, inbox)?;
            if round < self.setup_rounds {
                return Ok(false);
            }
            self.build_entities(ctx, s)?;
            return Ok(Self::all_halted(s));
        }
        for (port, m) in inbox.iter().enumerate() {
            if let Some(m) = m {
                s.inbound[port].extend_from_bitslice(m);
            }
        }
        let k = round - self.setup_rounds - 1;
        if k % self.slots + 1 < self.slots {
            return Ok(false);
        }
        self.simulate_round(ctx, s, k / self.slots + 1)?;
        Ok(Self::all_halted(s))
    }

    fn output(&self, _ctx: &NodeCtx, s: &Self::State) -> Self::Output {
        SimulatorOutput {
            nodes: s.nodes.iter().map(|e| (e.key, self.prog.node_output(&e.state), e.info.clone())).collect(),
            edges: s.edges.iter().map(|e| (e.key, self.prog.edge_output(&e.state), e.info.clone())).collect(),
            sim_rounds: s.sim_rounds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulatedRun<NO, EO> {
    pub transcript: Transcript,
    /// Simulated hypergraph rounds.
    pub rounds: usize,
    pub setup_rounds: usize,
    pub slots_per_round: usize,
    pub node_outputs: BTreeMap<Edge, NO>,
    pub edge_outputs: BTreeMap<Triangle, EO>,
    pub node_info: BTreeMap<Edge, Vec<u64>>,
    pub edge_info: BTreeMap<Triangle, Vec<u64>>,
}

impl<NO, EO> SimulatedRun<NO, EO> {
    /// Graph rounds per simulated round, not counting discovery.
    pub fn overhead(&self) -> f64 {
        if self.rounds == 0 {
            0.0
        } else {
            (self.transcript.rounds.saturating_sub(self.setup_rounds)) as f64 / self.rounds as f64
        }
    }
}

fn first_divergence(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len())) + 1
}

/// Run `prog` on the triangle hypergraph of `g`, with every entity simulated
/// by the graph nodes it touches. Fails on any disagreement between copies.
pub fn run_hypergraph_on_graph<P: HyperProgram>(
    g: &Graph,
    prog: &P,
    model: SimModel,
    seed: u64,
    max_sim_rounds: usize,
) -> Result<SimulatedRun<P::NodeOutput, P::EdgeOutput>, SimError> {
    let n = g.node_count();
    let sim = Simulator::new(prog, seed, n, g.max_degree(), model.bandwidth(n));
    let max_rounds = sim.setup_rounds + max_sim_rounds * sim.slots;
    let opts = RunOptions { record_messages: false, record_state_hashes: true };
    let run = run_with(g, &sim, model, seed, max_rounds, opts)?;

    let mut node_outputs = BTreeMap::new();
    let mut edge_outputs = BTreeMap::new();
    let mut node_info: BTreeMap<Edge, Vec<u64>> = BTreeMap::new();
    let mut edge_info: BTreeMap<Triangle, Vec<u64>> = BTreeMap::new();
    let mut rounds = 0;
    for out in &run.outputs {
        rounds = rounds.max(out.sim_rounds);
        for (e, o, info) in &out.nodes {
            match node_info.get(e) {
                Some(prev) if prev != info => {
                    return Err(SimError::Incoherent { round: first_divergence(prev, info), entity: format!("node {e}") })
                }
                Some(_) if node_outputs.get(e) != Some(o) => {
                    return Err(SimError::Incoherent { round: info.len(), entity: format!("node {e}") })
                }
                _ => {
                    node_info.insert(*e, info.clone());
                    node_outputs.insert(*e, o.clone());
                }
            }
        }
        for (t, o, info) in &out.edges {
            match edge_info.get(t) {
                Some(prev) if prev != info => {
                    let t = t.0;
                    return Err(SimError::Incoherent {
                        round: first_divergence(prev, info),
                        entity: format!("hyperedge {t:?}"),
                    });
                }
                Some(_) if edge_outputs.get(t) != Some(o) => {
                    return Err(SimError::Incoherent { round: info.len(), entity: format!("hyperedge {:?}", t.0) })
                }
                _ => {
                    edge_info.insert(*t, info.clone());
                    edge_outputs.insert(*t, o.clone());
                }
            }
        }
    }
    Ok(SimulatedRun {
        transcript: run.transcript,
        rounds,
        setup_rounds: sim.setup_rounds,
        slots_per_round: sim.slots,
        node_outputs,
        edge_outputs,
        node_info,
        edge_info,
    })
}

/// Whether a simulated run reproduced a direct run entity by entity:
/// outputs and essential-information chains. Returns the first mismatch.
pub fn compare_runs<NO: PartialEq + Debug, EO: PartialEq + Debug>(
    rh: &ReducedHypergraph,
    direct: &HyperRun<NO, EO>,
    simulated: &SimulatedRun<NO, EO>,
) -> Result<(), String> {
    if direct.rounds != simulated.rounds {
        return Err(format!("rounds differ: direct {} simulated {}", direct.rounds, simulated.rounds));
    }
    for (i, e) in rh.edges.iter().enumerate() {
        if simulated.node_outputs.get(e) != Some(&direct.node_outputs[i]) {
            return Err(format!("output of node {e} differs"));
        }
        if simulated.node_info.get(e) != Some(&direct.node_info[i]) {
            return Err(format!("history of node {e} differs"));
        }
    }
    for (j, t) in rh.triangles.iter().enumerate() {
        if simulated.edge_outputs.get(t) != Some(&direct.edge_outputs[j]) {
            return Err(format!("output of hyperedge {:?} differs", t.0));
        }
        if simulated.edge_info.get(t) != Some(&direct.edge_info[j]) {
            return Err(format!("history of hyperedge {:?} differs", t.0));
        }
    }
    if simulated.node_outputs.len() != rh.edges.len() || simulated.edge_outputs.len() != rh.triangles.len() {
        return Err("entity sets differ".into());
    }
    Ok(())
}

/// Two-round test program: nodes send a random byte to each hyperedge,
/// hyperedges answer each member with the xor of all bytes and its position.
#[derive(Clone, Copy, Debug, Default)]
pub struct Echo;

#[derive(Clone, Debug, Hash)]
pub struct EchoNode {
    degree: usize,
    heard: Vec<u8>,
}

#[derive(Clone, Debug, Hash)]
pub struct EchoEdge {
    sums: Vec<u8>,
}

impl HyperProgram for Echo {
    type NodeState = EchoNode;
    type EdgeState = EchoEdge;
    type NodeOutput = Vec<u8>;
    type EdgeOutput = Vec<u8>;

    fn max_message_bits(&self) -> usize {
        8
    }

    fn node_init(&self, _id: u64, _w: Weight, hyperedges: &[u64]) -> EchoNode {
        EchoNode { degree: hyperedges.len(), heard: Vec::new() }
    }

    fn edge_init(&self, _id: u64, _members: &[u64]) -> EchoEdge {
        EchoEdge { sums: Vec::new() }
    }

    fn node_send(&self, s: &mut EchoNode, _round: usize, rng: &mut NodeRng) -> Vec<Option<Payload>> {
        (0..s.degree)
            .map(|_| {
                let mut w = BitWriter::new();
                w.put(rng.0.random::<u8>() as u64, 8);
                Some(w.finish())
            })
            .collect()
    }

    fn edge_step(
        &self,
        s: &mut EchoEdge,
        round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<(Vec<Option<Payload>>, bool), SimError> {
        let mut x = 0u8;
        for m in inbox.iter().flatten() {
            x ^= BitReader::new(m).get(8)? as u8;
        }
        s.sums.push(x);
        let out = (0..inbox.len())
            .map(|k| {
                let mut w = BitWriter::new();
                w.put((x ^ k as u8) as u64, 8);
                Some(w.finish())
            })
            .collect();
        Ok((out, round >= 2))
    }

    fn node_receive(
        &self,
        s: &mut EchoNode,
        round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<bool, SimError> {
        for m in inbox.iter().flatten() {
            s.heard.push(BitReader::new(m).get(8)? as u8);
        }
        Ok(round >= 2)
    }

    fn node_output(&self, s: &EchoNode) -> Vec<u8> {
        s.heard.clone()
    }

    fn edge_output(&self, s: &EchoEdge) -> Vec<u8> {
        s.sums.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_direct_and_simulated_agree_on_k4() {
        let g = Graph::complete(4);
        let rh = g.reduced_hypergraph();
        for model in [SimModel::local(), SimModel::congest()] {
            let d = direct_run_hypergraph(&rh, 4, &Echo, 3, 10).unwrap();
            assert_eq!(d.edge_outputs.len(), 4);
            let s = run_hypergraph_on_graph(&g, &Echo, model, 3, 10).unwrap();
            compare_runs(&rh, &d, &s).unwrap();
            assert_eq!(s.rounds, 2);
        }
    }

    #[test]
    fn empty_hypergraph_halts_at_once() {
        let h = Hypergraph::unit(0, vec![]).unwrap();
        let r = direct_run_plain(&h, &Echo, 0, 5).unwrap();
        assert_eq!(r.rounds, 0);
    }

    #[test]
    fn triangle_free_runs_vacuously() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = run_hypergraph_on_graph(&g, &Echo, SimModel::local(), 0, 10).unwrap();
        assert!(s.edge_outputs.is_empty());
        assert!(s.node_outputs.values().all(|v| v.is_empty()));
    }
}
