//! Basic node programs: minimum-id flooding and triangle discovery.

use serde::Serialize;

use super::bits::{fragment, id_bits, BitReader, BitWriter, Payload};
use super::{run, NodeCtx, NodeProgram, NodeRng, SimModel};
use crate::error::SimError;
use crate::graph::{Graph, NodeId, Triangle};

/// Every node learns the smallest id in its component after `n - 1` rounds.
#[derive(Clone, Copy, Debug, Default)]
pub struct MinIdBroadcast;

#[derive(Clone, Debug, Hash)]
pub struct MinIdState {
    min: NodeId,
}

impl NodeProgram for MinIdBroadcast {
    type State = MinIdState;
    type Output = NodeId;

    fn init(&self, ctx: &NodeCtx) -> MinIdState {
        MinIdState { min: ctx.id }
    }

    fn send(&self, ctx: &NodeCtx, s: &mut MinIdState, _round: usize, _rng: &mut NodeRng) -> Vec<Option<Payload>> {
        let mut w = BitWriter::new();
        w.put(s.min as u64, id_bits(ctx.n));
        let msg = w.finish();
        vec![Some(msg); ctx.degree()]
    }

    fn receive(
        &self,
        ctx: &NodeCtx,
        s: &mut MinIdState,
        round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<bool, SimError> {
        for m in inbox.iter().flatten() {
            let v = BitReader::new(m).get(id_bits(ctx.n))? as NodeId;
            s.min = s.min.min(v);
        }
        Ok(round + 1 >= ctx.n)
    }

    fn output(&self, _ctx: &NodeCtx, s: &MinIdState) -> NodeId {
        s.min
    }
}

/// Rounds needed to ship a neighbour list of up to `max_degree` ids.
pub fn list_exchange_rounds(n: usize, max_degree: usize, bandwidth: Option<usize>) -> usize {
    match bandwidth {
        None => 1,
        Some(b) => (id_bits(n) * (1 + max_degree)).div_ceil(b).max(1),
    }
}

/// Sends the own neighbour list (count, then ids) to every neighbour,
/// fragmented to the bandwidth, and reassembles the neighbours' lists.
#[derive(Clone, Debug, Hash)]
pub struct ListExchange {
    chunks: Vec<Payload>,
    next: usize,
    buffers: Vec<Payload>,
    lists: Vec<Option<Vec<NodeId>>>,
}

impl ListExchange {
    pub fn new(ctx: &NodeCtx) -> Self {
        let b = id_bits(ctx.n);
        let mut w = BitWriter::new();
        w.put(ctx.degree() as u64, b);
        for &u in &ctx.neighbors {
            w.put(u as u64, b);
        }
        let list = w.finish();
        let chunks = match ctx.bandwidth {
            None => vec![list],
            Some(limit) => fragment(&list, limit),
        };
        ListExchange { chunks, next: 0, buffers: vec![Payload::new(); ctx.degree()], lists: vec![None; ctx.degree()] }
    }

    pub fn send(&mut self, ctx: &NodeCtx) -> Vec<Option<Payload>> {
        match self.chunks.get(self.next) {
            Some(c) => {
                self.next += 1;
                vec![Some(c.clone()); ctx.degree()]
            }
            None => Vec::new(),
        }
    }

    pub fn absorb(&mut self, ctx: &NodeCtx, inbox: &[Option<Payload>]) -> Result<(), SimError> {
        let b = id_bits(ctx.n);
        for (port, msg) in inbox.iter().enumerate() {
            let Some(msg) = msg else { continue };
            if self.lists[port].is_some() {
                return Err(SimError::Decode(format!("node {}: surplus list fragment on port {port}", ctx.id)));
            }
            self.buffers[port].extend_from_bitslice(msg);
            let buf = &self.buffers[port];
            if buf.len() < b {
                continue;
            }
            let mut r = BitReader::new(buf);
            let count = r.get(b)? as usize;
            if buf.len() >= b * (1 + count) {
                let list = (0..count).map(|_| r.get(b).map(|x| x as NodeId)).collect::<Result<Vec<_>, _>>()?;
                self.lists[port] = Some(list);
            }
        }
        Ok(())
    }

    pub fn done(&self) -> bool {
        self.next >= self.chunks.len() && self.lists.iter().all(Option::is_some)
    }

    /// Neighbour lists per port; `None` until complete.
    pub fn lists(&self) -> Option<Vec<Vec<NodeId>>> {
        self.lists.iter().cloned().collect()
    }
}

/// Triangles through `ctx.id` given the neighbours' lists.
pub fn local_triangles(ctx: &NodeCtx, lists: &[Vec<NodeId>]) -> Vec<Triangle> {
    let mut out = Vec::new();
    for (port, &u) in ctx.neighbors.iter().enumerate() {
        for &w in &lists[port] {
            if w > u && ctx.port_of(w).is_some() {
                out.push(Triangle::new(ctx.id, u, w));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TriangleDiscovery;

#[derive(Clone, Debug, Hash)]
pub struct DiscoveryState {
    exchange: ListExchange,
    triangles: Vec<Triangle>,
}

impl NodeProgram for TriangleDiscovery {
    type State = DiscoveryState;
    type Output = Vec<Triangle>;

    fn init(&self, ctx: &NodeCtx) -> DiscoveryState {
        DiscoveryState { exchange: ListExchange::new(ctx), triangles: Vec::new() }
    }

    fn send(&self, ctx: &NodeCtx, s: &mut DiscoveryState, _round: usize, _rng: &mut NodeRng) -> Vec<Option<Payload>> {
        s.exchange.send(ctx)
    }

    fn receive(
        &self,
        ctx: &NodeCtx,
        s: &mut DiscoveryState,
        _round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<bool, SimError> {
        s.exchange.absorb(ctx, inbox)?;
        if !s.exchange.done() {
            return Ok(false);
        }
        let lists = s.exchange.lists().expect("exchange is done");
        s.triangles = local_triangles(ctx, &lists);
        Ok(true)
    }

    fn output(&self, _ctx: &NodeCtx, s: &DiscoveryState) -> Vec<Triangle> {
        s.triangles.clone()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Discovery {
    pub triangles: Vec<Vec<Triangle>>,
    pub rounds: usize,
    pub max_edge_bits: usize,
}

/// Every node learns the triangles it belongs to.
pub fn triangle_discovery(g: &Graph, model: SimModel) -> Result<Discovery, SimError> {
    let bound = list_exchange_rounds(g.node_count(), g.max_degree(), model.bandwidth(g.node_count()));
    let run = run(g, &TriangleDiscovery, model, 0, bound + 1)?;
    Ok(Discovery {
        triangles: run.outputs,
        rounds: run.transcript.rounds,
        max_edge_bits: run.transcript.max_edge_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_id_on_path() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = run(&g, &MinIdBroadcast, SimModel::local(), 1, 10).unwrap();
        assert_eq!(r.outputs, vec![0; 4]);
        assert_eq!(r.transcript.rounds, 3);
    }

    #[test]
    fn discovery_on_k4() {
        let g = Graph::complete(4);
        let d = triangle_discovery(&g, SimModel::local()).unwrap();
        assert_eq!(d.rounds, 1);
        assert!(d.triangles.iter().all(|t| t.len() == 3));
        let c = triangle_discovery(&g, SimModel::congest()).unwrap();
        assert!(c.rounds <= 3);
        assert_eq!(c.triangles, d.triangles);
    }
}
