use std::io::Write;
use std::process::{Command, Output, Stdio};

use mtet_core::gadgets::is_ring_of_triangles;
use mtet_core::verify::random_graph;
use mtet_core::Graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn mtet(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mtet"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn mtet");
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn line_pipes_into_enumeration() {
    let line = mtet(&["gen", "line", "--t", "4"], None);
    let text = String::from_utf8(line.stdout).unwrap();
    let rep = json_of(&mtet(&["solve-exact", "--enumerate"], Some(&text)));
    assert_eq!(rep["result"]["value"], 2);
    assert_eq!(rep["result"]["count"], 1);
}

#[test]
fn generated_graphs_reparse() {
    let ring = mtet(&["gen", "ring", "--t", "8"], None);
    let g = Graph::from_json(std::str::from_utf8(&ring.stdout).unwrap()).unwrap();
    assert!(is_ring_of_triangles(&g, 8));
    assert!(!g.labels().is_empty());

    let pair = json_of(&mtet(&["gen", "theorem1", "--t", "8"], None));
    let short = Graph::from_json(&pair["short"].to_string()).unwrap();
    let long = Graph::from_json(&pair["long"].to_string()).unwrap();
    assert_eq!(short.node_count(), long.node_count());
    assert_ne!(pair["output_short"], pair["output_long"]);
}

#[test]
fn lbgraph_with_sidecar() {
    let dir = std::env::temp_dir().join(format!("mtet-sidecar-{}", std::process::id()));
    let out = mtet(&["gen", "lbgraph", "--k", "2", "--x", "1000", "--y", "1000", "--sidecar", dir.to_str().unwrap()], None);
    let g = Graph::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(g.node_count(), 62);
    let side: Value = serde_json::from_str(&std::fs::read_to_string(&dir).unwrap()).unwrap();
    assert_eq!(side["params"]["m"], 32);
    std::fs::remove_file(dir).ok();
}

#[test]
fn lemma_holds_on_thirty_samples() {
    let rep = json_of(&mtet(&["verify", "lemma", "--k", "2", "--samples", "30", "--seed", "7"], None));
    assert_eq!(rep["passed"], true);
    let lemma = rep["result"]["lemma"].as_array().unwrap();
    assert_eq!(lemma.len(), 30);
    assert!(lemma.iter().all(|l| l["equivalence"] == true && l["tau_at_least_m"] == true));
}

#[test]
fn ball_carving_within_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_graph(14, 0.4, &mut rng);
    let rep = json_of(&mtet(&["approx", "ball-carving", "--eps", "0.5"], Some(&g.to_json())));
    let value = rep["result"]["value"].as_i64().unwrap() as f64;
    let tau = rep["result"]["tau"].as_i64().unwrap() as f64;
    assert!(value <= 1.5 * tau);
    assert_eq!(rep["result"]["audits"]["charging"], true);

    let dist = json_of(&mtet(&["approx", "ball-carving", "--eps", "1/2", "--distributed", "--seed", "4"], Some(&g.to_json())));
    assert_eq!(dist["passed"], true);
    assert!(dist["result"]["decomposition"]["c"].as_u64().unwrap() >= 1);
}

#[test]
fn mhvc_reports_ratio() {
    let g = Graph::complete(5);
    for variant in ["matching", "primal-dual"] {
        let rep = json_of(&mtet(&["approx", "mhvc", "--variant", variant, "--model", "congest", "--seed", "2"], Some(&g.to_json())));
        assert_eq!(rep["passed"], true);
        assert_eq!(rep["result"]["matches_direct"], true);
        assert_eq!(rep["result"]["tau"], 4);
    }
}

#[test]
fn sim_is_deterministic() {
    let g = Graph::complete(6).to_json();
    let args = ["sim", "run", "--program", "triangles", "--model", "congest", "--seed", "9", "--messages"];
    let a = json_of(&mtet(&args, Some(&g)));
    let b = json_of(&mtet(&args, Some(&g)));
    assert_eq!(a["result"], b["result"]);
    assert!(a["result"]["max_edge_bits"].as_u64().unwrap() <= a["result"]["bandwidth_bits"].as_u64().unwrap());
}

#[test]
fn tabular_reports_as_csv() {
    let out = mtet(&["report", "clique", "--n", "3,4,5", "--format", "csv"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,tau,formula,mu,optima"));
    assert_eq!(text.lines().nth(3), Some("5,4,4,2,10"));

    let out = mtet(&["report", "cut", "--k", "2", "--format", "csv"], None);
    assert!(String::from_utf8(out.stdout).unwrap().contains("2,4,62,12,"));
}

#[test]
fn selected_criteria_pass() {
    let rep = json_of(&mtet(&["verify", "all", "--profile", "desk", "--only", "1,2,10"], None));
    assert_eq!(rep["passed"], true);
    assert_eq!(rep["criteria"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mtet(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(mtet(&["gen", "line", "--t", "3"], None).status.code(), Some(2));
    assert_eq!(mtet(&["solve-exact"], Some("{\"n\": 2, \"edges\": [[0, 0]]}")).status.code(), Some(2));
    assert_eq!(mtet(&["gen", "line", "--t", "4", "--format", "csv"], None).status.code(), Some(2));
    assert_eq!(mtet(&["verify", "all", "--only", "11"], None).status.code(), Some(2));
}

#[test]
fn slack_out_of_range_is_rejected() {
    let out = mtet(&["approx", "mhvc", "--variant", "primal-dual", "--eps", "2"], Some(&Graph::complete(4).to_json()));
    assert_eq!(out.status.code(), Some(2));
}
