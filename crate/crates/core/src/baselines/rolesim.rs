//! RoleSim: all-pairs role similarity by fixed-point iteration.
//!
//! ```text
//! s(u, v) <- (1 - β) · M(u, v) / max(d_u, d_v) + β
//! ```
//!
//! where `M(u, v)` is the maximum total previous-round score of a matching
//! between the neighbourhoods of `u` and `v`. Scores start at 1 and decrease
//! monotonically.

use crate::baselines::assignment::max_weight_assignment;
use crate::baselines::top_k_by_scores;
use crate::budget::Budget;
use crate::error::{ForestSimError, Result};
use crate::graph::Graph;
use crate::search::TopKResult;

pub const DEFAULT_ROLESIM_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoleSimConfig {
    /// Decay weight β in `(0, 1)`; also the score floor.
    pub beta: f64,
    pub max_iterations: usize,
    /// Stop once no score moves by more than this.
    pub convergence_tol: f64,
    pub dense_limit: usize,
}

impl Default for RoleSimConfig {
    fn default() -> Self {
        Self {
            beta: 0.1,
            max_iterations: 20,
            convergence_tol: 1e-4,
            dense_limit: DEFAULT_ROLESIM_LIMIT,
        }
    }
}

impl RoleSimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(ForestSimError::Config(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if self.max_iterations == 0 {
            return Err(ForestSimError::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoleSimScores {
    n: usize,
    data: Vec<f64>,
    /// Largest absolute score change of each iteration.
    pub deltas: Vec<f64>,
}

impl RoleSimScores {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn iterations(&self) -> usize {
        self.deltas.len()
    }

    pub fn score(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }
}

pub fn rolesim_compute(g: &Graph, cfg: &RoleSimConfig) -> Result<RoleSimScores> {
    rolesim_compute_with(g, cfg, &Budget::unlimited())
}

pub fn rolesim_compute_with(g: &Graph, cfg: &RoleSimConfig, budget: &Budget) -> Result<RoleSimScores> {
    cfg.validate()?;
    let n = g.n();
    if n > cfg.dense_limit {
        return Err(ForestSimError::SizeLimit {
            what: "RoleSim",
            n,
            limit: cfg.dense_limit,
            hint: "",
        });
    }
    let mut old = vec![1.0; n * n];
    let mut new = vec![1.0; n * n];
    let mut deltas = Vec::new();
    for _ in 0..cfg.max_iterations {
        let mut delta: f64 = 0.0;
        for u in 0..n {
            budget.check()?;
            for v in u + 1..n {
                let s = update(g, &old, n, u, v, cfg.beta);
                delta = delta.max((s - old[u * n + v]).abs());
                new[u * n + v] = s;
                new[v * n + u] = s;
            }
        }
        std::mem::swap(&mut old, &mut new);
        deltas.push(delta);
        if delta <= cfg.convergence_tol {
            break;
        }
    }
    Ok(RoleSimScores {
        n,
        data: old,
        deltas,
    })
}

fn update(g: &Graph, prev: &[f64], n: usize, u: usize, v: usize, beta: f64) -> f64 {
    let (mut a, mut b) = (g.neighbors(u), g.neighbors(v));
    if a.len() > b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let matched = match (a.len(), b.len()) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        (_, wide) => {
            let total = max_weight_assignment(a.len(), b.len(), |i, j| {
                prev[a[i] as usize * n + b[j] as usize]
            });
            total / wide as f64
        }
    };
    (1.0 - beta) * matched + beta
}

/// Top-k from row `u` of the score matrix, ties broken by ascending id.
pub fn rolesim_topk(scores: &RoleSimScores, u: usize, k: usize) -> Result<TopKResult> {
    if u >= scores.n {
        return Err(ForestSimError::UnknownNode(u.to_string()));
    }
    let row = scores.row(u);
    top_k_by_scores(scores.n, u, k, |v| row[v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::toy_graph;
    use crate::generators;

    fn converged() -> RoleSimConfig {
        RoleSimConfig {
            max_iterations: 500,
            convergence_tol: 1e-6,
            ..Default::default()
        }
    }

    #[test]
    fn toy_graph_scores() {
        let (g, _) = toy_graph();
        let s = rolesim_compute(&g, &converged()).unwrap();
        assert!(*s.deltas.last().unwrap() <= 1e-6);
        for u in 0..4 {
            assert_eq!(s.score(u, u), 1.0);
            for v in 0..4 {
                assert_eq!(s.score(u, v), s.score(v, u));
                assert!((0.1..=1.0).contains(&s.score(u, v)));
            }
        }
        assert!((s.score(2, 3) - 1.0).abs() < 1e-12);
        assert_eq!(rolesim_topk(&s, 2, 1).unwrap().nodes(), vec![3]);
        assert_eq!(rolesim_topk(&s, 2, 3).unwrap().hits.len(), 3);
    }

    #[test]
    fn isolated_nodes() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let s = rolesim_compute(&Graph::from_edges(2, []).unwrap(), &converged()).unwrap();
        assert_eq!(s.score(0, 1), 1.0);
        let s2 = rolesim_compute(&g, &converged()).unwrap();
        assert!((s2.score(0, 2) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn deltas_do_not_increase() {
        let g = generators::gnm(40, 90, 2);
        let s = rolesim_compute(
            &g,
            &RoleSimConfig {
                max_iterations: 15,
                convergence_tol: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(s.iterations(), 15);
        for w in s.deltas[1..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{:?}", s.deltas);
        }
    }

    #[test]
    fn limits_and_config() {
        let g = generators::path(12);
        let cfg = RoleSimConfig {
            dense_limit: 10,
            ..Default::default()
        };
        assert!(matches!(rolesim_compute(&g, &cfg), Err(ForestSimError::SizeLimit { .. })));
        let cfg = RoleSimConfig {
            beta: 1.0,
            ..Default::default()
        };
        assert!(rolesim_compute(&g, &cfg).is_err());
    }
}
