//! Distributed hypergraph vertex cover programs and the triangle transversal
//! obtained by running them on the triangle hypergraph of a graph.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ApproxError, OracleError, SimError};
use crate::graph::{EdgeSet, Graph, Hypergraph, Triangle, Weight};
use crate::simnet::bits::{value_bits, BitReader, BitWriter, Payload};
use crate::simnet::hyper::{direct_run_hypergraph, direct_run_plain, run_hypergraph_on_graph, HyperProgram, HyperRun};
use crate::simnet::{NodeRng, SimModel};

/// Rank of triangle hypergraphs.
pub const F: usize = 3;

/// Fate of a hyperedge at the end of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct HyperedgeOutcome {
    /// Selected into the matching.
    pub joined: bool,
    /// Accumulated dual, in scaled integer units.
    pub dual: u64,
}

fn one_bit(b: bool) -> Payload {
    let mut w = BitWriter::new();
    w.put_bit(b);
    w.finish()
}

/// Randomized maximal matching of hyperedges; the cover is every node of
/// every selected hyperedge.
///
/// Each phase is two rounds. First, nodes report whether they are covered;
/// a hyperedge with a covered member retires, otherwise it draws a random
/// priority. Second, each node points at its best open hyperedge by
/// (priority, id); a hyperedge pointed at by all members joins.
#[derive(Clone, Copy, Debug, Default)]
pub struct MatchingProgram;

#[derive(Clone, Debug, Hash)]
pub struct MatchingNode {
    hyperedges: Vec<u64>,
    open: Vec<bool>,
    priority: Vec<Option<u32>>,
    in_cover: bool,
}

#[derive(Clone, Debug, Hash)]
pub struct MatchingEdge {
    joined: bool,
}

impl HyperProgram for MatchingProgram {
    type NodeState = MatchingNode;
    type EdgeState = MatchingEdge;
    type NodeOutput = bool;
    type EdgeOutput = HyperedgeOutcome;

    fn max_message_bits(&self) -> usize {
        1
    }

    fn node_init(&self, _id: u64, _w: Weight, hyperedges: &[u64]) -> MatchingNode {
        MatchingNode {
            hyperedges: hyperedges.to_vec(),
            open: vec![true; hyperedges.len()],
            priority: vec![None; hyperedges.len()],
            in_cover: false,
        }
    }

    fn edge_init(&self, _id: u64, _members: &[u64]) -> MatchingEdge {
        MatchingEdge { joined: false }
    }

    fn node_send(&self, s: &mut MatchingNode, round: usize, _rng: &mut NodeRng) -> Vec<Option<Payload>> {
        if round % 2 == 1 {
            return s.open.iter().map(|&o| o.then(|| one_bit(s.in_cover))).collect();
        }
        let best = (0..s.open.len())
            .filter(|&k| s.open[k])
            .filter_map(|k| s.priority[k].map(|p| (p, s.hyperedges[k], k)))
            .max()
            .map(|(_, _, k)| k);
        (0..s.open.len()).map(|k| s.open[k].then(|| one_bit(best == Some(k)))).collect()
    }

    fn edge_step(
        &self,
        s: &mut MatchingEdge,
        round: usize,
        inbox: &[Option<Payload>],
        rng: &mut NodeRng,
    ) -> Result<(Vec<Option<Payload>>, bool), SimError> {
        let bits: Vec<Option<bool>> =
            inbox.iter().map(|m| m.as_ref().map(|m| BitReader::new(m).get_bit()).transpose()).collect::<Result<_, _>>()?;
        if round % 2 == 1 {
            if bits.iter().any(|b| *b != Some(false)) {
                return Ok((vec![Some(one_bit(false)); inbox.len()], true));
            }
            let p: u32 = rng.0.random();
            let mut w = BitWriter::new();
            w.put_bit(true).put(p as u64, 32);
            let msg = w.finish();
            return Ok((vec![Some(msg); inbox.len()], false));
        }
        if bits.iter().all(|b| *b == Some(true)) {
            s.joined = true;
            return Ok((vec![Some(one_bit(true)); inbox.len()], true));
        }
        Ok((Vec::new(), false))
    }

    fn node_receive(
        &self,
        s: &mut MatchingNode,
        round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<bool, SimError> {
        for (k, m) in inbox.iter().enumerate() {
            let Some(m) = m else { continue };
            let mut r = BitReader::new(m);
            let flag = r.get_bit()?;
            if round % 2 == 1 {
                if flag {
                    s.priority[k] = Some(r.get(32)? as u32);
                } else {
                    s.open[k] = false;
                }
            } else if flag {
                s.in_cover = true;
                s.open[k] = false;
            }
        }
        if round.is_multiple_of(2) {
            s.priority.iter_mut().for_each(|p| *p = None);
        }
        Ok(s.open.iter().all(|o| !o))
    }

    fn node_output(&self, s: &MatchingNode) -> bool {
        s.in_cover
    }

    fn edge_output(&self, s: &MatchingEdge) -> HyperedgeOutcome {
        HyperedgeOutcome { joined: s.joined, dual: 0 }
    }
}

/// Weighted primal-dual cover. Weights are scaled to integers large enough
/// that every open node can bid at least one unit. Each round, every open
/// hyperedge raises its dual by the smallest bid `floor(residual / open
/// degree)` among its members; a node joins once its residual drops to
/// `eps * weight`. The cover weighs at most `F / (1 - eps)` times the optimum.
#[derive(Clone, Debug)]
pub struct PrimalDualProgram {
    eps: Weight,
    scale: Weight,
    bid_bits: usize,
}

impl PrimalDualProgram {
    pub const DEFAULT_EPS: (i64, i64) = (1, 8);

    /// Program for hypergraphs with these node weights and max degree.
    pub fn new(weights: &[Weight], max_degree: usize, eps: Weight) -> Result<Self, ApproxError> {
        if eps <= Weight::zero() || eps >= Weight::one() {
            return Err(ApproxError::BadSlack);
        }
        let lcm = weights.iter().fold(1i64, |acc, w| acc.lcm(w.denom()));
        let Some(min) = weights.iter().min() else {
            return Ok(PrimalDualProgram { eps, scale: Weight::one(), bid_bits: 1 });
        };
        // integer weights, then a factor making eps * w_min >= max_degree + 1
        let w_min = (min * lcm).to_integer();
        let need = Weight::from_integer(max_degree as i64 + 1) / (eps * w_min);
        let factor = need.ceil().to_integer().max(1);
        let scale = Weight::from_integer(lcm.checked_mul(factor).ok_or(OracleError::WeightOverflow)?);
        let max = weights.iter().max().expect("nonempty");
        let top = max.numer().checked_mul(*scale.numer()).ok_or(OracleError::WeightOverflow)? / max.denom();
        Ok(PrimalDualProgram { eps, scale, bid_bits: value_bits(top as u64) })
    }

    pub fn default_eps() -> Weight {
        Weight::new(Self::DEFAULT_EPS.0, Self::DEFAULT_EPS.1)
    }

    pub fn eps(&self) -> Weight {
        self.eps
    }

    /// Factor applied to node weights before running.
    pub fn scale(&self) -> Weight {
        self.scale
    }
}

#[derive(Clone, Debug, Hash)]
pub struct PrimalDualNode {
    weight: u64,
    residual: u64,
    open: Vec<bool>,
    in_cover: bool,
}

#[derive(Clone, Debug, Hash)]
pub struct PrimalDualEdge {
    dual: u64,
}

impl HyperProgram for PrimalDualProgram {
    type NodeState = PrimalDualNode;
    type EdgeState = PrimalDualEdge;
    type NodeOutput = bool;
    type EdgeOutput = HyperedgeOutcome;

    fn max_message_bits(&self) -> usize {
        1 + self.bid_bits
    }

    fn node_init(&self, _id: u64, w: Weight, hyperedges: &[u64]) -> PrimalDualNode {
        let weight = (w * self.scale).to_integer() as u64;
        PrimalDualNode { weight, residual: weight, open: vec![true; hyperedges.len()], in_cover: false }
    }

    fn edge_init(&self, _id: u64, _members: &[u64]) -> PrimalDualEdge {
        PrimalDualEdge { dual: 0 }
    }

    fn node_send(&self, s: &mut PrimalDualNode, _round: usize, _rng: &mut NodeRng) -> Vec<Option<Payload>> {
        let degree = s.open.iter().filter(|&&o| o).count() as u64;
        let bid = if s.in_cover || degree == 0 { 0 } else { s.residual / degree };
        s.open
            .iter()
            .map(|&o| {
                o.then(|| {
                    let mut w = BitWriter::new();
                    w.put_bit(s.in_cover).put(bid, self.bid_bits);
                    w.finish()
                })
            })
            .collect()
    }

    fn edge_step(
        &self,
        s: &mut PrimalDualEdge,
        _round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<(Vec<Option<Payload>>, bool), SimError> {
        let mut min = u64::MAX;
        for m in inbox {
            let Some(m) = m else {
                return Err(SimError::Model("open hyperedge with a silent member".into()));
            };
            let mut r = BitReader::new(m);
            if r.get_bit()? {
                return Ok((vec![Some(one_bit(false)); inbox.len()], true));
            }
            min = min.min(r.get(self.bid_bits)?);
        }
        s.dual += min;
        let mut w = BitWriter::new();
        w.put_bit(true).put(min, self.bid_bits);
        let msg = w.finish();
        Ok((vec![Some(msg); inbox.len()], false))
    }

    fn node_receive(
        &self,
        s: &mut PrimalDualNode,
        _round: usize,
        inbox: &[Option<Payload>],
        _rng: &mut NodeRng,
    ) -> Result<bool, SimError> {
        for (k, m) in inbox.iter().enumerate() {
            let Some(m) = m else { continue };
            let mut r = BitReader::new(m);
            if r.get_bit()? {
                let delta = r.get(self.bid_bits)?;
                s.residual = s
                    .residual
                    .checked_sub(delta)
                    .ok_or_else(|| SimError::Model("dual exceeds node weight".into()))?;
            } else {
                s.open[k] = false;
            }
        }
        let threshold = Weight::from_integer(s.weight as i64) * self.eps;
        if !s.in_cover && Weight::from_integer(s.residual as i64) <= threshold {
            s.in_cover = true;
        }
        Ok(s.open.iter().all(|o| !o))
    }

    fn node_output(&self, s: &PrimalDualNode) -> bool {
        s.in_cover
    }

    fn edge_output(&self, s: &PrimalDualEdge) -> HyperedgeOutcome {
        HyperedgeOutcome { joined: false, dual: s.dual }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MhvcVariant {
    Matching,
    PrimalDual,
}

impl FromStr for MhvcVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "matching" => Ok(MhvcVariant::Matching),
            "primal-dual" => Ok(MhvcVariant::PrimalDual),
            _ => Err(format!("unknown variant {s:?} (matching, primal-dual)")),
        }
    }
}

impl fmt::Display for MhvcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MhvcVariant::Matching => "matching",
            MhvcVariant::PrimalDual => "primal-dual",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MhvcConfig {
    pub variant: MhvcVariant,
    /// Residual threshold of the primal-dual variant.
    pub eps: Weight,
    /// Cap on simulated rounds.
    pub max_rounds: usize,
}

impl MhvcConfig {
    pub fn new(variant: MhvcVariant) -> Self {
        MhvcConfig { variant, eps: PrimalDualProgram::default_eps(), max_rounds: 100_000 }
    }

    /// Proven approximation factor of the variant.
    pub fn factor(&self) -> Weight {
        match self.variant {
            MhvcVariant::Matching => Weight::from_integer(F as i64),
            MhvcVariant::PrimalDual => Weight::from_integer(F as i64) / (Weight::one() - self.eps),
        }
    }
}

/// Cover found on a plain hypergraph by direct execution.
#[derive(Clone, Debug, Serialize)]
pub struct HypergraphCover {
    pub cover: BTreeSet<usize>,
    pub value: Weight,
    pub rounds: usize,
    /// Hyperedges selected by the matching variant.
    pub selected: Vec<usize>,
    pub duals: Vec<u64>,
}

fn collect_cover(run: &HyperRun<bool, HyperedgeOutcome>, h: &Hypergraph) -> HypergraphCover {
    let cover: BTreeSet<usize> = (0..h.node_count()).filter(|&v| run.node_outputs[v]).collect();
    HypergraphCover {
        value: h.weight_of(&cover),
        cover,
        rounds: run.rounds,
        selected: (0..run.edge_outputs.len()).filter(|&j| run.edge_outputs[j].joined).collect(),
        duals: run.edge_outputs.iter().map(|o| o.dual).collect(),
    }
}

/// Run the chosen program directly on `h`.
pub fn mhvc_direct(h: &Hypergraph, cfg: &MhvcConfig, seed: u64) -> Result<HypergraphCover, ApproxError> {
    let run = match cfg.variant {
        MhvcVariant::Matching => direct_run_plain(h, &MatchingProgram, seed, cfg.max_rounds)?,
        MhvcVariant::PrimalDual => {
            let p = PrimalDualProgram::new(h.weights(), h.max_degree(), cfg.eps)?;
            direct_run_plain(h, &p, seed, cfg.max_rounds)?
        }
    };
    Ok(collect_cover(&run, h))
}

#[derive(Clone, Debug, Serialize)]
pub struct MhvcOutcome {
    pub variant: MhvcVariant,
    pub model: String,
    pub cover: EdgeSet,
    pub value: Weight,
    pub valid: bool,
    /// Triangles selected by the matching variant.
    pub selected: Vec<Triangle>,
    /// Simulated hypergraph rounds.
    pub simulated_rounds: usize,
    /// Graph rounds including triangle discovery.
    pub graph_rounds: usize,
    pub setup_rounds: usize,
    pub slots_per_round: usize,
    pub max_edge_bits: usize,
    pub bandwidth_bits: Option<usize>,
    pub max_degree: usize,
    /// Whether a direct run on the hypergraph produced the same entity histories.
    pub matches_direct: Option<bool>,
}

fn simulate<P: HyperProgram<NodeOutput = bool, EdgeOutput = HyperedgeOutcome>>(
    g: &Graph,
    prog: &P,
    cfg: &MhvcConfig,
    model: SimModel,
    seed: u64,
    check_direct: bool,
) -> Result<MhvcOutcome, ApproxError> {
    let run = run_hypergraph_on_graph(g, prog, model, seed, cfg.max_rounds)?;
    let cover: EdgeSet = run.node_outputs.iter().filter(|(_, &c)| c).map(|(e, _)| *e).collect();
    let matches_direct = if check_direct {
        let rh = g.reduced_hypergraph();
        let direct = direct_run_hypergraph(&rh, g.node_count(), prog, seed, cfg.max_rounds)?;
        Some(crate::simnet::hyper::compare_runs(&rh, &direct, &run).is_ok())
    } else {
        None
    };
    Ok(MhvcOutcome {
        variant: cfg.variant,
        model: model.to_string(),
        value: g.weight_of(&cover)?,
        valid: g.is_tet(&cover)?,
        selected: run.edge_outputs.iter().filter(|(_, o)| o.joined).map(|(t, _)| *t).collect(),
        cover,
        simulated_rounds: run.rounds,
        graph_rounds: run.transcript.rounds,
        setup_rounds: run.setup_rounds,
        slots_per_round: run.slots_per_round,
        max_edge_bits: run.transcript.max_edge_bits,
        bandwidth_bits: run.transcript.bandwidth_bits,
        max_degree: g.max_degree(),
        matches_direct,
    })
}

/// Triangle transversal of `g`: cover the triangle hypergraph with the
/// chosen program, simulated on `g` itself, and return the covered edges.
pub fn mtet_via_mhvc(
    g: &Graph,
    cfg: &MhvcConfig,
    model: SimModel,
    seed: u64,
    check_direct: bool,
) -> Result<MhvcOutcome, ApproxError> {
    let out = match cfg.variant {
        MhvcVariant::Matching => simulate(g, &MatchingProgram, cfg, model, seed, check_direct)?,
        MhvcVariant::PrimalDual => {
            let rh = g.reduced_hypergraph();
            let p = PrimalDualProgram::new(rh.hypergraph.weights(), rh.hypergraph.max_degree(), cfg.eps)?;
            simulate(g, &p, cfg, model, seed, check_direct)?
        }
    };
    if !out.valid {
        return Err(ApproxError::InvalidCover);
    }
    Ok(out)
}

/// Whether `selected` hyperedges are pairwise disjoint and every hyperedge
/// meets one of them.
pub fn is_maximal_matching(h: &Hypergraph, selected: &[usize]) -> bool {
    let mut used = BTreeSet::new();
    for &j in selected {
        for &v in &h.hyperedges()[j] {
            if !used.insert(v) {
                return false;
            }
        }
    }
    h.hyperedges().iter().all(|he| he.iter().any(|v| used.contains(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_hyperedge() {
        let h = Hypergraph::unit(3, vec![vec![0, 1, 2]]).unwrap();
        let m = mhvc_direct(&h, &MhvcConfig::new(MhvcVariant::Matching), 1).unwrap();
        assert_eq!(m.cover.len(), 3);
        let w = Hypergraph::new(vec![Weight::from(1), Weight::from(10), Weight::from(10)], vec![vec![0, 1, 2]]).unwrap();
        let p = mhvc_direct(&w, &MhvcConfig::new(MhvcVariant::PrimalDual), 1).unwrap();
        assert_eq!(p.cover, BTreeSet::from([0]));
        assert_eq!(p.value, Weight::from(1));
    }

    #[test]
    fn empty_hypergraph() {
        let h = Hypergraph::unit(2, vec![]).unwrap();
        for v in [MhvcVariant::Matching, MhvcVariant::PrimalDual] {
            assert!(mhvc_direct(&h, &MhvcConfig::new(v), 0).unwrap().cover.is_empty());
        }
    }

    #[test]
    fn k4_both_variants_and_models() {
        let g = Graph::complete(4);
        for v in [MhvcVariant::Matching, MhvcVariant::PrimalDual] {
            for model in [SimModel::local(), SimModel::congest()] {
                let out = mtet_via_mhvc(&g, &MhvcConfig::new(v), model, 5, true).unwrap();
                assert!(out.valid);
                assert!(out.value <= Weight::from(6));
                assert_eq!(out.matches_direct, Some(true));
            }
        }
    }
}
