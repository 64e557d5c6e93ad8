//! Top-k walk against a full sort of every candidate.
//!
//! The oracle ranks each `v != u` by descending similarity; among equal
//! similarities, candidates above `u` in the sorted order come before those
//! below it, and nearer positions come first on each side.

use forestsim::generators;
use forestsim::search::{build_index, ForestIndex, MethodTag};
use forestsim::{approx_forest_diag, forest_diag_exact, ApproxConfig, Graph};
use proptest::prelude::*;

fn oracle(idx: &ForestIndex, u: usize, k: usize) -> Vec<usize> {
    let rank = idx.rankvec()[u] as i64;
    let mut all: Vec<(f64, u8, i64, usize)> = (0..idx.n())
        .filter(|&v| v != u)
        .map(|v| {
            let p = idx.rankvec()[v] as i64;
            let side = if p > rank { 0 } else { 1 };
            (idx.forest_sim(u, v).unwrap(), side, (p - rank).abs(), v)
        })
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    all.into_iter().take(k).map(|t| t.3).collect()
}

fn check_all_queries(idx: &ForestIndex, kmax: usize) {
    for u in 0..idx.n() {
        for k in 1..=kmax.min(idx.n() - 1) {
            let (res, evaluations) = idx.top_k_search_counted(u, k).unwrap();
            assert_eq!(res.nodes(), oracle(idx, u, k), "u = {u}, k = {k}");
            assert!(evaluations <= 2 * k);
            for w in res.hits.windows(2) {
                assert!(w[0].score >= w[1].score);
            }
        }
    }
}

#[test]
fn exact_indexes_on_random_graphs() {
    for seed in 0..40 {
        let n = 2 + (seed as usize * 37) % 150;
        let m = (n * (n - 1) / 2).min(2 * n);
        let g = generators::gnm(n, m, seed);
        let idx = build_index(&g, forest_diag_exact(&g).unwrap(), MethodTag::Exact).unwrap();
        check_all_queries(&idx, 10);
    }
}

#[test]
fn heavy_ties() {
    // complete graphs and stars are almost all ties
    for g in [generators::complete(12), generators::star(15), generators::cycle(9)] {
        let idx = build_index(&g, forest_diag_exact(&g).unwrap(), MethodTag::Exact).unwrap();
        check_all_queries(&idx, 10);
    }
    let idx = ForestIndex::new(vec![0.5, 0.25, 0.5, 0.25, 0.5, 1.0], [0; 32], MethodTag::Exact).unwrap();
    check_all_queries(&idx, 5);
}

#[test]
fn approximate_index() {
    let g = generators::gnm(120, 300, 3);
    let cfg = ApproxConfig {
        jl_constant: 1.0,
        epsilon: 0.3,
        ..ApproxConfig::default()
    };
    let w = approx_forest_diag(&g, &cfg).unwrap();
    let idx = build_index(&g, w, MethodTag::Approx { epsilon: 0.3, seed: 0 }).unwrap();
    check_all_queries(&idx, 10);
}

#[test]
fn top_k_all_matches_single_queries() {
    let g = generators::gnm(80, 200, 11);
    let idx = build_index(&g, forest_diag_exact(&g).unwrap(), MethodTag::Exact).unwrap();
    let all = idx.top_k_all(10).unwrap();
    for (u, r) in all.iter().enumerate() {
        assert_eq!(r, &idx.top_k_search(u, 10).unwrap());
    }
    assert_eq!(idx.top_k_all(500).unwrap()[0].hits.len(), 79);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_diagonals(w in proptest::collection::vec(1u32..6, 2..40)) {
        // coarse values force many exact ties
        let w: Vec<f64> = w.into_iter().map(|x| x as f64 / 6.0).collect();
        let idx = ForestIndex::new(w, [0; 32], MethodTag::Exact).unwrap();
        check_all_queries(&idx, 10);
    }

    #[test]
    fn random_graphs(n in 2usize..60, density in 0.0f64..0.3, seed in any::<u64>()) {
        let g = generators::gnp(n, density, seed);
        let idx = build_index(&g, forest_diag_exact(&g).unwrap(), MethodTag::Exact).unwrap();
        check_all_queries(&idx, 10);
    }
}

#[test]
fn edgeless_graph_is_all_ties() {
    let g = Graph::from_edges(6, []).unwrap();
    let idx = build_index(&g, forest_diag_exact(&g).unwrap(), MethodTag::Exact).unwrap();
    assert_eq!(idx.top_k_search(2, 3).unwrap().nodes(), vec![3, 4, 5]);
    check_all_queries(&idx, 5);
}
