//! Fixtures shared by the benchmarks.

use forestsim::generators::gnm;
use forestsim::{approx_forest_diag, build_index, ApproxConfig, ForestIndex, Graph, MethodTag};

/// Sparse random graph with average degree 4, the shape used by the bench
/// command.
pub fn sparse_graph(n: usize, seed: u64) -> Graph {
    gnm(n, 2 * n, seed)
}

pub fn approx_index(g: &Graph) -> ForestIndex {
    let cfg = ApproxConfig::default();
    let w = approx_forest_diag(g, &cfg).expect("approximate diagonal");
    build_index(g, w, MethodTag::Approx { epsilon: cfg.epsilon, seed: cfg.seed }).expect("index")
}
