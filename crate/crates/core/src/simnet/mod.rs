//! Synchronous message-passing simulator with LOCAL and CONGEST accounting.
//!
//! Each round every active node first produces one optional message per
//! port, then all messages are delivered and every active node processes its
//! inbox. A round therefore costs one hop of communication.

pub mod bits;
pub mod hyper;
pub mod programs;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::graph::{Graph, NodeId, Weight};
pub use bits::Payload;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Local,
    Congest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimModel {
    pub mode: Mode,
    /// CONGEST message limit; `None` picks the default for the graph size.
    pub bandwidth_bits: Option<usize>,
}

impl SimModel {
    pub fn local() -> Self {
        SimModel { mode: Mode::Local, bandwidth_bits: None }
    }

    pub fn congest() -> Self {
        SimModel { mode: Mode::Congest, bandwidth_bits: None }
    }

    pub fn congest_with(bits: usize) -> Result<Self, SimError> {
        if bits == 0 {
            return Err(SimError::Model("bandwidth must be positive".into()));
        }
        Ok(SimModel { mode: Mode::Congest, bandwidth_bits: Some(bits) })
    }

    /// `4 * ceil(log2 n)` bits, at least 4.
    pub fn default_bandwidth(n: usize) -> usize {
        4 * bits::id_bits(n)
    }

    /// Effective per-message limit on an `n`-node graph, `None` in LOCAL.
    pub fn bandwidth(&self, n: usize) -> Option<usize> {
        match self.mode {
            Mode::Local => None,
            Mode::Congest => Some(self.bandwidth_bits.unwrap_or_else(|| Self::default_bandwidth(n))),
        }
    }
}

impl FromStr for SimModel {
    type Err = SimError;

    /// `local`, `congest`, or `congest:BITS`.
    fn from_str(s: &str) -> Result<Self, SimError> {
        match s.split_once(':') {
            None if s.eq_ignore_ascii_case("local") => Ok(Self::local()),
            None if s.eq_ignore_ascii_case("congest") => Ok(Self::congest()),
            Some((m, b)) if m.eq_ignore_ascii_case("congest") => {
                let bits = b.parse().map_err(|_| SimError::Model(format!("bad bandwidth {b:?}")))?;
                Self::congest_with(bits)
            }
            _ => Err(SimError::Model(format!("unknown model {s:?}"))),
        }
    }
}

impl fmt::Display for SimModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.mode, self.bandwidth_bits) {
            (Mode::Local, _) => write!(f, "local"),
            (Mode::Congest, None) => write!(f, "congest"),
            (Mode::Congest, Some(b)) => write!(f, "congest:{b}"),
        }
    }
}

/// What a node knows about itself before the first round.
#[derive(Clone, Debug)]
pub struct NodeCtx {
    pub id: NodeId,
    pub n: usize,
    /// Neighbours in ascending order; port `i` leads to `neighbors[i]`.
    pub neighbors: Vec<NodeId>,
    /// Weight of the edge behind each port.
    pub weights: Vec<Weight>,
    pub bandwidth: Option<usize>,
    pub max_degree: usize,
}

impl NodeCtx {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }

    pub fn port_of(&self, v: NodeId) -> Option<usize> {
        self.neighbors.binary_search(&v).ok()
    }
}

/// Per-node randomness that can be hashed as part of a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRng(pub ChaCha8Rng);

impl NodeRng {
    /// Independent stream for `(seed, tag, key)`.
    pub fn derive(seed: u64, tag: u64, key: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(tag.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ key);
        NodeRng(rng)
    }
}

impl Hash for NodeRng {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.get_seed().hash(state);
        self.0.get_stream().hash(state);
        self.0.get_word_pos().hash(state);
    }
}

/// A node's behaviour. Deterministic given its state, inbox and rng.
pub trait NodeProgram: Sync {
    type State: Clone + Hash + Send + Sync;
    type Output: Clone + Serialize + Send;

    fn init(&self, ctx: &NodeCtx) -> Self::State;

    /// One optional message per port, or an empty vec for silence.
    fn send(&self, ctx: &NodeCtx, state: &mut Self::State, round: usize, rng: &mut NodeRng) -> Vec<Option<Payload>>;

    /// Process the round's inbox (indexed by port). Returns whether the node halts.
    fn receive(
        &self,
        ctx: &NodeCtx,
        state: &mut Self::State,
        round: usize,
        inbox: &[Option<Payload>],
        rng: &mut NodeRng,
    ) -> Result<bool, SimError>;

    fn output(&self, ctx: &NodeCtx, state: &Self::State) -> Self::Output;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MessageRecord {
    pub from: NodeId,
    pub to: NodeId,
    pub bits: usize,
    /// Hex of the payload bytes, last byte zero-padded.
    pub payload: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub model: String,
    pub seed: u64,
    pub bandwidth_bits: Option<usize>,
    pub rounds: usize,
    pub max_edge_bits: usize,
    pub per_round_message_counts: Vec<usize>,
    /// Messages of each round, ordered by (from, to).
    pub messages: Vec<Vec<MessageRecord>>,
    /// Hash of every node's state after each round.
    pub state_hashes: Vec<Vec<u64>>,
    pub outputs: Vec<serde_json::Value>,
    pub completed: bool,
}

impl Transcript {
    pub fn total_messages(&self) -> usize {
        self.per_round_message_counts.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct Run<O> {
    pub transcript: Transcript,
    pub outputs: Vec<O>,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub record_messages: bool,
    pub record_state_hashes: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { record_messages: true, record_state_hashes: true }
    }
}

pub(crate) fn hash_of<T: Hash + ?Sized>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

pub fn contexts(g: &Graph, model: SimModel) -> Vec<NodeCtx> {
    let n = g.node_count();
    let bandwidth = model.bandwidth(n);
    let max_degree = g.max_degree();
    (0..n)
        .map(|v| {
            let inc = g.incident(v);
            NodeCtx {
                id: v,
                n,
                neighbors: inc.iter().map(|&(u, _)| u).collect(),
                weights: inc.iter().map(|&(_, i)| g.weight(i)).collect(),
                bandwidth,
                max_degree,
            }
        })
        .collect()
}

pub fn run<P: NodeProgram>(
    g: &Graph,
    program: &P,
    model: SimModel,
    seed: u64,
    max_rounds: usize,
) -> Result<Run<P::Output>, SimError> {
    run_with(g, program, model, seed, max_rounds, RunOptions::default())
}

/// Run `program` on every node of `g` in lock step until all nodes halt.
pub fn run_with<P: NodeProgram>(
    g: &Graph,
    program: &P,
    model: SimModel,
    seed: u64,
    max_rounds: usize,
    opts: RunOptions,
) -> Result<Run<P::Output>, SimError> {
    if max_rounds == 0 {
        return Err(SimError::Model("max_rounds must be at least 1".into()));
    }
    let n = g.node_count();
    let ctxs = contexts(g, model);
    let bandwidth = model.bandwidth(n);
    let mut states: Vec<P::State> = ctxs.par_iter().map(|c| program.init(c)).collect();
    let mut rngs: Vec<NodeRng> = (0..n).map(|v| NodeRng::derive(seed, 0, v as u64)).collect();
    let mut active = vec![true; n];
    let mut tr = Transcript {
        model: model.to_string(),
        seed,
        bandwidth_bits: bandwidth,
        rounds: 0,
        max_edge_bits: 0,
        per_round_message_counts: Vec::new(),
        messages: Vec::new(),
        state_hashes: Vec::new(),
        outputs: Vec::new(),
        completed: false,
    };

    for round in 1..=max_rounds {
        let outboxes: Vec<Vec<Option<Payload>>> = states
            .par_iter_mut()
            .zip(rngs.par_iter_mut())
            .enumerate()
            .map(|(v, (s, r))| if active[v] { program.send(&ctxs[v], s, round, r) } else { Vec::new() })
            .collect();

        let mut inboxes: Vec<Vec<Option<Payload>>> = ctxs.iter().map(|c| vec![None; c.degree()]).collect();
        let mut records = Vec::new();
        let mut count = 0;
        for (v, out) in outboxes.into_iter().enumerate() {
            if out.is_empty() {
                continue;
            }
            if out.len() != ctxs[v].degree() {
                return Err(SimError::Model(format!(
                    "node {v} produced {} messages for {} ports",
                    out.len(),
                    ctxs[v].degree()
                )));
            }
            for (port, msg) in out.into_iter().enumerate() {
                let Some(msg) = msg else { continue };
                let to = ctxs[v].neighbors[port];
                if let Some(limit) = bandwidth {
                    if msg.len() > limit {
                        return Err(SimError::Bandwidth { round, from: v, to, bits: msg.len(), limit });
                    }
                }
                count += 1;
                tr.max_edge_bits = tr.max_edge_bits.max(msg.len());
                if opts.record_messages {
                    records.push(MessageRecord { from: v, to, bits: msg.len(), payload: bits::to_hex(&msg) });
                }
                let back = ctxs[to].port_of(v).expect("adjacency is symmetric");
                inboxes[to][back] = Some(msg);
            }
        }
        tr.per_round_message_counts.push(count);
        if opts.record_messages {
            tr.messages.push(records);
        }

        let halted: Vec<Result<bool, SimError>> = states
            .par_iter_mut()
            .zip(rngs.par_iter_mut())
            .zip(inboxes.par_iter())
            .enumerate()
            .map(|(v, ((s, r), inbox))| {
                if active[v] {
                    program.receive(&ctxs[v], s, round, inbox, r)
                } else {
                    Ok(true)
                }
            })
            .collect();
        for (v, h) in halted.into_iter().enumerate() {
            if h? {
                active[v] = false;
            }
        }
        if opts.record_state_hashes {
            tr.state_hashes.push(states.par_iter().map(hash_of).collect());
        }
        tr.rounds = round;
        if active.iter().all(|a| !a) {
            tr.completed = true;
            break;
        }
    }

    let outputs: Vec<P::Output> = ctxs.iter().zip(&states).map(|(c, s)| program.output(c, s)).collect();
    tr.outputs = outputs.iter().map(|o| serde_json::to_value(o).unwrap_or(serde_json::Value::Null)).collect();
    if !tr.completed {
        return Err(SimError::Timeout { rounds: max_rounds, partial: Some(Box::new(tr)) });
    }
    Ok(Run { transcript: tr, outputs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_models() {
        assert_eq!("local".parse::<SimModel>().unwrap(), SimModel::local());
        assert_eq!("congest".parse::<SimModel>().unwrap(), SimModel::congest());
        assert_eq!("congest:64".parse::<SimModel>().unwrap().bandwidth(10), Some(64));
        assert!("congest:0".parse::<SimModel>().is_err());
        assert!("gossip".parse::<SimModel>().is_err());
        assert_eq!(SimModel::congest().bandwidth(62), Some(24));
    }
}
