//! Desk-scale verification suite: one runner per acceptance criterion,
//! shared by the command line and the acceptance test.

use std::collections::BTreeSet;
use std::time::Instant;

use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::carving::{audit_carving, ball_carve_distributed, ball_carve_sequential, network_decomposition, validate_decomposition};
use crate::gadgets::{check_indistinguishability, default_radius, is_ring_of_triangles, make_line, make_ring, make_theorem1_pair};
use crate::graph::{Edge, Graph, Weight};
use crate::lbgraph::{
    add_inputs, build_fixed, construct_cover, cut_and_bound_report, sample_inputs, verify_bit_correspondence, verify_family,
};
use crate::mhvc::{mtet_via_mhvc, MhvcConfig, MhvcVariant};
use crate::oracle::{clique_profile, clique_tau_formula, enumerate_min_tets, map_cover, tau, SolverConfig};
use crate::simnet::SimModel;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub details: Value,
    pub elapsed_ms: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<32} {}  {} ({:.1}s)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.summary,
            self.elapsed_ms / 1000.0
        )
    }
}

fn timed<F: FnOnce() -> (bool, String, Value)>(id: usize, name: &'static str, f: F) -> CriterionResult {
    let start = Instant::now();
    let (passed, summary, details) = f();
    CriterionResult { id, name, passed, summary, details, elapsed_ms: start.elapsed().as_secs_f64() * 1e3 }
}

fn failed(e: impl std::fmt::Display) -> (bool, String, Value) {
    (false, format!("error: {e}"), Value::Null)
}

/// Uniform random graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Graph::new(n, pairs).expect("random pairs are valid")
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteGraph {
    pub index: usize,
    pub n: usize,
    pub p: f64,
    pub max_degree: usize,
    #[serde(skip)]
    pub graph: Graph,
}

/// Largest degree allowed in the random suite.
pub const SUITE_MAX_DEGREE: usize = 8;
pub const SUITE_SIZE: usize = 50;
pub const SUITE_SEED: u64 = 2024;

/// Seeded random graphs with `n <= 25`, `p` cycling through 0.2, 0.3, 0.5,
/// and maximum degree at most 8 (resampled until it is).
pub fn random_suite(count: usize, seed: u64) -> Vec<SuiteGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|index| {
            let (p, lo, hi) = match index % 3 {
                0 => (0.2, 20, 25),
                1 => (0.3, 15, 18),
                _ => (0.5, 8, 12),
            };
            let n = rng.random_range(lo..=hi);
            loop {
                let g = random_graph(n, p, &mut rng);
                if g.max_degree() <= SUITE_MAX_DEGREE {
                    return SuiteGraph { index, n, p, max_degree: g.max_degree(), graph: g };
                }
            }
        })
        .collect()
}

/// Same topology with seeded integer weights in `1..=4`.
pub fn weighted_copy(g: &Graph, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize, Weight)> =
        g.edges().iter().map(|e| (e.0, e.1, Weight::from_integer(rng.random_range(1..=4)))).collect();
    Graph::with_weights(g.node_count(), edges).expect("reweighting keeps the graph valid")
}

/// Exact optima of lines and rings of triangles.
pub fn criterion_1() -> CriterionResult {
    timed(1, "gadget exactness", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for t in [2, 4, 6, 8, 10] {
            let r = make_line(t).map_err(|e| e.to_string()).and_then(|l| enumerate_min_tets(&l.graph).map_err(|e| e.to_string()));
            match r {
                Ok(opt) => {
                    let good = opt.len() == 1 && opt[0].len() == t / 2;
                    ok &= good;
                    rows.push(json!({"gadget": "line", "t": t, "tau": opt.first().map(|s| s.len()), "optima": opt.len(), "ok": good}));
                }
                Err(e) => return failed(e),
            }
        }
        for t in [6, 8, 10] {
            let r = make_ring(t).map_err(|e| e.to_string()).and_then(|l| enumerate_min_tets(&l.graph).map_err(|e| e.to_string()));
            match r {
                Ok(opt) => {
                    let good = opt.len() == 2 && opt.iter().all(|s| s.len() == t / 2);
                    ok &= good;
                    rows.push(json!({"gadget": "ring", "t": t, "tau": opt.first().map(|s| s.len()), "optima": opt.len(), "ok": good}));
                }
                Err(e) => return failed(e),
            }
        }
        (ok, "lines t=2..10 unique optimum t/2; rings t=6,8,10 two optima t/2".into(), json!(rows))
    })
}

fn subsets(items: &[usize], k: usize) -> Vec<BTreeSet<usize>> {
    if k == 0 {
        return vec![BTreeSet::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], k);
    for mut s in subsets(&items[1..], k - 1) {
        s.insert(items[0]);
        out.push(s);
    }
    out
}

/// Clique optima, the incident-edge maximum, and forced neighbourhoods.
pub fn criterion_2() -> CriterionResult {
    timed(2, "clique profile", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for n in 3..=7 {
            let p = match clique_profile(n) {
                Ok(p) => p,
                Err(e) => return failed(e),
            };
            let tau_ok = p.tau == clique_tau_formula(n);
            let mu_ok = (n - 1).div_ceil(6) <= p.mu && p.mu <= n - 2;
            let mut checked = 0;
            let mut forced_ok = true;
            for v in 0..n {
                let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
                for s in subsets(&others, p.mu) {
                    let want: BTreeSet<Edge> = s.iter().map(|&u| Edge::new(v, u)).collect();
                    forced_ok &= p.optima.iter().any(|o| o.incident_to(v).iter().copied().collect::<BTreeSet<_>>() == want);
                    checked += 1;
                }
            }
            let good = tau_ok && mu_ok && forced_ok;
            ok &= good;
            rows.push(json!({"n": n, "tau": p.tau, "formula": clique_tau_formula(n), "mu": p.mu,
                "optima": p.optima.len(), "subsets_checked": checked, "forced_ok": forced_ok, "ok": good}));
        }
        (ok, "tau(K_n) formula, mu bounds, every (v, mu-subset) forced for n=3..7".into(), json!(rows))
    })
}

/// Relabelled minimum transversals of K_5 and K_6 stay minimum transversals.
pub fn criterion_3(seed: u64) -> CriterionResult {
    timed(3, "transversal preserved by relabel", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ok = true;
        let mut rows = Vec::new();
        for n in [5, 6] {
            let g = Graph::complete(n);
            let opt = match tau(&g) {
                Ok(s) => s.cover,
                Err(e) => return failed(e),
            };
            let mut good = 0;
            for _ in 0..100 {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                if let Ok(m) = map_cover(&g, &opt, &perm) {
                    if m.len() == opt.len() && g.is_tet(&m).unwrap_or(false) {
                        good += 1;
                    }
                }
            }
            ok &= good == 100;
            rows.push(json!({"n": n, "size": opt.len(), "permutations": 100, "valid": good}));
        }
        (ok, "100/100 permutations valid for K_5 and K_6".into(), json!(rows))
    })
}

/// The k = 2 lower-bound family against the exact solver.
pub fn criterion_4(samples: usize, seed: u64) -> CriterionResult {
    timed(4, "lower-bound family k=2", || {
        let fixed = match build_fixed(2) {
            Ok(f) => f,
            Err(e) => return failed(e),
        };
        let n = fixed.graph.node_count();
        let m = fixed.params.m;
        let rings_ok: Vec<bool> = fixed
            .roles
            .rings
            .iter()
            .map(|r| {
                let nodes: BTreeSet<usize> = r.edges.iter().flat_map(|e| [e.0, e.1]).collect();
                let idx: Vec<usize> = nodes.into_iter().collect();
                let local = |x: usize| idx.binary_search(&x).expect("ring node");
                Graph::new(idx.len(), r.edges.iter().map(|e| (local(e.0), local(e.1))))
                    .map(|g| is_ring_of_triangles(&g, 20))
                    .unwrap_or(false)
            })
            .collect();
        let fam = match verify_family(2, samples, seed, true) {
            Ok(f) => f,
            Err(e) => return failed(e),
        };
        let ones = "1".repeat(fixed.params.big_k);
        let zeros = "0".repeat(fixed.params.big_k);
        let has_ones = fam.lemma.iter().any(|l| l.x == ones && l.y == ones);
        let has_zeros = fam.lemma.iter().any(|l| l.x == zeros && l.y == zeros);
        let all_hold = fam.lemma.iter().all(|l| l.tau_at_least_m && l.equivalence);
        let ok = n == 62 && m == 32 && rings_ok.len() == 2 && rings_ok.iter().all(|&b| b)
            && fam.samples >= 30 && has_ones && has_zeros && all_hold && fam.holds();
        let intersecting = fam.lemma.iter().filter(|l| !l.disj).count();
        (
            ok,
            format!("n={n} M={m}, {} samples ({intersecting} intersecting), rings ok, tau>=M and tau=M iff intersecting", fam.samples),
            json!({"n": n, "m": m, "rings": rings_ok, "samples": fam.samples, "seed": seed,
                "lemma": fam.lemma, "violations": fam.violations}),
        )
    })
}

/// Constructed size-M covers decode back to their index pair.
pub fn criterion_5(samples: usize, seed: u64) -> CriterionResult {
    timed(5, "constructive cover k=2", || {
        let fixed = match build_fixed(2) {
            Ok(f) => f,
            Err(e) => return failed(e),
        };
        let side = fixed.params.mu + 1;
        let inputs = sample_inputs(fixed.params.big_k, samples, seed);
        let results: Vec<(usize, usize, usize, bool)> = inputs
            .par_iter()
            .enumerate()
            .flat_map_iter(|(s, (x, y))| {
                let inst = add_inputs(&fixed, x, y).ok();
                let mut out = Vec::new();
                for i in 0..side {
                    for j in 0..side {
                        let idx = i * side + j;
                        if !(x[idx] && y[idx]) {
                            continue;
                        }
                        let good = inst.as_ref().is_some_and(|inst| {
                            construct_cover(inst, i, j).is_ok_and(|c| {
                                c.len() == fixed.params.m
                                    && inst.graph.is_tet(&c).unwrap_or(false)
                                    && verify_bit_correspondence(inst, &c).ok() == Some((i, j))
                            })
                        });
                        out.push((s, i, j, good));
                    }
                }
                out
            })
            .collect();
        let ok = !results.is_empty() && results.iter().all(|r| r.3);
        let bad: Vec<_> = results.iter().filter(|r| !r.3).map(|r| json!({"sample": r.0, "i": r.1, "j": r.2})).collect();
        (
            ok,
            format!("{} (sample, i, j) cases, {} failures", results.len(), bad.len()),
            json!({"samples": samples, "seed": seed, "cases": results.len(), "failures": bad}),
        )
    })
}

/// Probe views agree while the unique optima disagree.
pub fn criterion_6() -> CriterionResult {
    timed(6, "indistinguishability", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for t in [8, 12, 16] {
            let rep = make_theorem1_pair(t).and_then(|p| check_indistinguishability(&p, default_radius(&p)).map(|r| (p, r)));
            match rep {
                Ok((p, r)) => {
                    ok &= r.holds();
                    rows.push(json!({"t": t, "d_short": p.diameter_short, "d_long": p.diameter_long, "report": r}));
                }
                Err(e) => return failed(e),
            }
        }
        (ok, "t=8,12,16 balls isomorphic at floor(D/2)-1, outputs differ".into(), json!(rows))
    })
}

pub const CARVING_EPS: [(i64, i64); 3] = [(1, 10), (1, 2), (1, 1)];

/// Ball carving on the random suite, both modes, with all audits.
pub fn criterion_7(suite: &[SuiteGraph], seed: u64) -> CriterionResult {
    timed(7, "ball carving", || {
        let cfg = &SolverConfig::default();
        let rows: Vec<Value> = suite
            .par_iter()
            .flat_map_iter(|sg| {
                let g = &sg.graph;
                let opt = tau(g);
                CARVING_EPS.iter().map(move |&(a, b)| {
                    let eps = Weight::new(a, b);
                    let res = (|| -> Result<Value, String> {
                        let opt = opt.as_ref().map_err(|e| e.to_string())?;
                        let dist = ball_carve_distributed(g, eps, seed ^ sg.index as u64, cfg).map_err(|e| e.to_string())?;
                        let seq = ball_carve_sequential(g, eps, &dist.carving.order, cfg).map_err(|e| e.to_string())?;
                        let a_seq = audit_carving(g, eps, &seq.steps, &seq.cover, Some(&opt.cover)).map_err(|e| e.to_string())?;
                        let a_dist = audit_carving(g, eps, &dist.carving.steps, &dist.carving.cover, Some(&opt.cover))
                            .map_err(|e| e.to_string())?;
                        let ok = a_seq.holds() && a_dist.holds() && seq.value == dist.carving.value;
                        Ok(json!({"graph": sg.index, "n": sg.n, "p": sg.p, "eps": format!("{a}/{b}"),
                            "tau": opt.value.to_string(), "value": seq.value.to_string(),
                            "distributed_value": dist.carving.value.to_string(),
                            "ratio": (seq.value / opt.value.max(Weight::one())).to_f64(),
                            "c": dist.decomposition.c, "d": dist.decomposition.d,
                            "rounds": dist.rounds, "max_steps": a_seq.max_steps, "step_cap": a_seq.step_cap, "ok": ok}))
                    })();
                    res.unwrap_or_else(|e| json!({"graph": sg.index, "eps": format!("{a}/{b}"), "ok": false, "error": e}))
                })
            })
            .collect();
        let bad = rows.iter().filter(|r| r["ok"] != json!(true)).count();
        let worst = rows.iter().filter_map(|r| r["ratio"].as_f64()).fold(0.0, f64::max);
        (
            bad == 0,
            format!("{} runs, {bad} failures, worst value/tau {worst:.3}", rows.len()),
            json!(rows),
        )
    })
}

/// Planned constant for the CONGEST/LOCAL round ratio, `ratio <= C * Delta`.
pub const OVERHEAD_CONSTANT: f64 = 2.0;

/// Cover via the triangle hypergraph, simulated on the graph, both models.
pub fn criterion_8(suite: &[SuiteGraph], seed: u64) -> CriterionResult {
    timed(8, "hypergraph cover pipeline", || {
        let rows: Vec<Value> = suite
            .par_iter()
            .map(|sg| {
                let res = (|| -> Result<Value, String> {
                    let g = &sg.graph;
                    let gw = weighted_copy(g, seed ^ (sg.index as u64) << 8);
                    let s = seed ^ sg.index as u64;
                    let tau_u = tau(g).map_err(|e| e.to_string())?.value;
                    let tau_w = tau(&gw).map_err(|e| e.to_string())?.value;
                    let mut ok = true;
                    let mut runs = Vec::new();
                    let mut worst_c: f64 = 0.0;
                    for (variant, graph, opt) in [(MhvcVariant::Matching, g, tau_u), (MhvcVariant::PrimalDual, &gw, tau_w)] {
                        let cfg = MhvcConfig::new(variant);
                        let local = mtet_via_mhvc(graph, &cfg, SimModel::local(), s, true).map_err(|e| e.to_string())?;
                        let congest = mtet_via_mhvc(graph, &cfg, SimModel::congest(), s, true).map_err(|e| e.to_string())?;
                        let bound = cfg.factor() * opt;
                        let delta = graph.max_degree().max(1) as f64;
                        let ratio = congest.graph_rounds as f64 / local.graph_rounds.max(1) as f64;
                        worst_c = worst_c.max(ratio / delta);
                        let good = local.valid
                            && congest.valid
                            && local.value <= bound
                            && local.cover == congest.cover
                            && local.matches_direct == Some(true)
                            && congest.matches_direct == Some(true)
                            && congest.max_edge_bits <= congest.bandwidth_bits.unwrap_or(usize::MAX)
                            && ratio <= OVERHEAD_CONSTANT * delta;
                        ok &= good;
                        runs.push(json!({"variant": variant, "tau": opt.to_string(), "value": local.value.to_string(),
                            "bound": bound.to_string(), "local_rounds": local.graph_rounds,
                            "congest_rounds": congest.graph_rounds, "simulated_rounds": local.simulated_rounds,
                            "slots": congest.slots_per_round, "max_edge_bits": congest.max_edge_bits,
                            "bandwidth": congest.bandwidth_bits, "ratio": ratio, "ok": good}));
                    }
                    Ok(json!({"graph": sg.index, "n": sg.n, "delta": sg.max_degree, "c": worst_c, "runs": runs, "ok": ok}))
                })();
                res.unwrap_or_else(|e| json!({"graph": sg.index, "ok": false, "error": e}))
            })
            .collect();
        let bad = rows.iter().filter(|r| r["ok"] != json!(true)).count();
        let c = rows.iter().filter_map(|r| r["c"].as_f64()).fold(0.0, f64::max);
        (
            bad == 0,
            format!("{} graphs, {bad} failures, measured c = {c:.3} (allowed {OVERHEAD_CONSTANT})", rows.len()),
            json!({"measured_c": c, "graphs": rows}),
        )
    })
}

/// Decomposition of `G^4` for `G(200, 0.05)` over 20 seeds.
pub fn criterion_9(seed: u64) -> CriterionResult {
    timed(9, "decomposition quality", || {
        let n = 200;
        let limit = 8.0 * (n as f64).log2();
        let rows: Vec<Value> = (0..20u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
                let g = random_graph(n, 0.05, &mut rng);
                let dec = network_decomposition(&g, 4, seed.wrapping_add(1000 + i));
                let valid = validate_decomposition(&g, &dec).is_ok();
                let within = (dec.c as f64) <= limit && (dec.d as f64) <= limit;
                json!({"seed": i, "c": dec.c, "d": dec.d, "clusters": dec.members.len(), "retries": dec.retries,
                    "valid": valid, "within": within, "ok": valid && within})
            })
            .collect();
        let good = rows.iter().filter(|r| r["ok"] == json!(true)).count();
        let all_valid = rows.iter().all(|r| r["valid"] == json!(true));
        (
            all_valid && good * 100 >= 95 * rows.len(),
            format!("{good}/{} seeds valid with c, d <= {limit:.1}", rows.len()),
            json!(rows),
        )
    })
}

/// Crossing edges of the lower-bound graphs.
pub fn criterion_10() -> CriterionResult {
    timed(10, "cut accounting", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for (k, want) in [(2, 12), (4, 24)] {
            let inst = match build_fixed(k) {
                Ok(i) => i,
                Err(e) => return failed(e),
            };
            let rep = cut_and_bound_report(&inst);
            let good = rep.cut == want && rep.per_ring.iter().all(|&c| c == 6) && rep.outside_rings == 0;
            ok &= good;
            rows.push(json!({"k": k, "K": rep.big_k, "n": rep.n, "cut": rep.cut, "per_ring": rep.per_ring,
                "bound": rep.bound, "ok": good}));
        }
        (ok, "6 crossing edges per ring; 12 at k=2, 24 at k=4".into(), json!(rows))
    })
}

/// All criteria at their desk-scale parameters.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    let suite = random_suite(SUITE_SIZE, SUITE_SEED);
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(seed),
        criterion_4(30, 7),
        criterion_5(20, seed),
        criterion_6(),
        criterion_7(&suite, seed),
        criterion_8(&suite, seed),
        criterion_9(seed),
        criterion_10(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_respects_degree_cap() {
        let s = random_suite(9, 1);
        assert!(s.iter().all(|g| g.max_degree <= SUITE_MAX_DEGREE && g.n <= 25));
        assert_eq!(s.iter().filter(|g| g.p == 0.5).count(), 3);
    }

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(&[1, 2, 3, 4, 5], 2).len(), 10);
        assert_eq!(subsets(&[1, 2], 0).len(), 1);
    }
}
