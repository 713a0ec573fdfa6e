//! Shared inputs for the benchmarks.

use mtet_core::verify::random_graph;
use mtet_core::Graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(n: usize, p: f64, seed: u64) -> Graph {
    random_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}
