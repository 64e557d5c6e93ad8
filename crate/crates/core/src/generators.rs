//! Deterministic graph generators for tests and benchmarks.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("n > 0")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 nodes");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("n > 0")
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("n > 0")
}

/// Star with node 0 at the centre and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("n > 0")
}

/// Uniform graph with exactly `m` distinct edges.
pub fn gnm(n: usize, m: usize, seed: u64) -> Graph {
    let max = n * n.saturating_sub(1) / 2;
    assert!(m <= max, "{m} edges do not fit on {n} nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complement = m > max / 2;
    let target = if complement { max - m } else { m };
    let mut chosen = HashSet::with_capacity(target);
    while chosen.len() < target {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            chosen.insert((u.min(v), u.max(v)));
        }
    }
    let mut edges: Vec<(usize, usize)> = if complement {
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|e| !chosen.contains(e))
            .collect()
    } else {
        chosen.into_iter().collect()
    };
    edges.sort_unstable();
    Graph::from_edges(n, edges).expect("n > 0")
}

/// Erdős–Rényi graph where every pair is an edge with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("n > 0")
}

/// Every labelled simple graph on `n` nodes, in edge-mask order. Only
/// sensible for `n <= 6`.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    assert!(pairs.len() < 32);
    (0u32..1 << pairs.len()).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        Graph::from_edges(n, edges).expect("n > 0")
    })
}

pub fn is_connected(g: &Graph) -> bool {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            let v = v as usize;
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == g.n()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnm_edge_count_and_determinism() {
        let a = gnm(100, 200, 3);
        assert_eq!(a.m(), 200);
        assert_eq!(a, gnm(100, 200, 3));
        assert_ne!(a, gnm(100, 200, 4));
        assert_eq!(gnm(6, 14, 1).m(), 14);
    }

    #[test]
    fn connected_graph_counts() {
        // labelled connected graphs on 4 and 5 nodes
        assert_eq!(all_graphs(4).filter(is_connected).count(), 38);
        assert_eq!(all_graphs(5).filter(is_connected).count(), 728);
    }

    #[test]
    fn fixtures() {
        assert_eq!(star(4).degree(0), 4);
        assert_eq!(complete(5).m(), 10);
        assert_eq!(cycle(5).m(), 5);
        assert_eq!(path(1).n(), 1);
    }
}
