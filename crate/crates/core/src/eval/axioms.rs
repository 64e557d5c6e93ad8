//! Checks of the five role-similarity axioms against any pairwise measure.
//!
//! - P1 range: `sim(u, v)` in `[0, 1]`
//! - P2 symmetry
//! - P3 automorphism confirmation: automorphic nodes score 1
//! - P4 transitive similarity: `sim(u, v) = sim(u', v)` when `u ≅ u'`
//! - P5 triangle inequality on `dist = 1 - sim`
//!
//! Automorphic pairs come from twins: two nodes with the same open or closed
//! neighbourhood can be swapped by an automorphism. Callers may register
//! more pairs they know to be automorphic.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::{RoleSimScores, StructSimIndex};
use crate::graph::Graph;
use crate::search::ForestIndex;

pub const AXIOM_TOLERANCE: f64 = 1e-9;
const MAX_COUNTEREXAMPLES: usize = 5;

pub trait SimilarityMeasure: Sync {
    fn name(&self) -> String;
    fn n(&self) -> usize;
    /// Both nodes are valid ids below `n()`.
    fn score(&self, u: usize, v: usize) -> f64;
}

impl SimilarityMeasure for ForestIndex {
    fn name(&self) -> String {
        "ForestSim".into()
    }

    fn n(&self) -> usize {
        ForestIndex::n(self)
    }

    fn score(&self, u: usize, v: usize) -> f64 {
        self.forest_sim(u, v).expect("node ids in range")
    }
}

impl SimilarityMeasure for StructSimIndex {
    fn name(&self) -> String {
        "StructSim".into()
    }

    fn n(&self) -> usize {
        StructSimIndex::n(self)
    }

    fn score(&self, u: usize, v: usize) -> f64 {
        crate::baselines::structsim_score(self, u, v).expect("node ids in range")
    }
}

impl SimilarityMeasure for RoleSimScores {
    fn name(&self) -> String {
        "RoleSim".into()
    }

    fn n(&self) -> usize {
        RoleSimScores::n(self)
    }

    fn score(&self, u: usize, v: usize) -> f64 {
        RoleSimScores::score(self, u, v)
    }
}

/// Wraps a closure as a measure.
pub struct FnMeasure<F> {
    pub name: String,
    pub n: usize,
    pub score: F,
}

impl<F: Fn(usize, usize) -> f64 + Sync> SimilarityMeasure for FnMeasure<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn n(&self) -> usize {
        self.n
    }

    fn score(&self, u: usize, v: usize) -> f64 {
        (self.score)(u, v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub property: &'static str,
    pub checked: usize,
    pub violations: usize,
    pub counterexamples: Vec<String>,
}

impl AxiomCheck {
    fn new(property: &'static str) -> Self {
        Self {
            property,
            checked: 0,
            violations: 0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub measure: String,
    /// Automorphic pairs used for P3 and P4.
    pub automorphic_pairs: Vec<(usize, usize)>,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn check(&self, property: &str) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.property == property)
            .expect("all five properties are checked")
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }
}

/// Pairs of twins (equal open or closed neighbourhoods), each pair once
/// with the smaller id first.
pub fn automorphic_twins(g: &Graph) -> Vec<(usize, usize)> {
    let mut open: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    let mut closed: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for u in 0..g.n() {
        let nbrs = g.neighbors(u).to_vec();
        let mut with_self = nbrs.clone();
        let pos = with_self.binary_search(&(u as u32)).unwrap_or_else(|p| p);
        with_self.insert(pos, u as u32);
        open.entry(nbrs).or_default().push(u);
        closed.entry(with_self).or_default().push(u);
    }
    let mut pairs: Vec<(usize, usize)> = open
        .values()
        .chain(closed.values())
        .flat_map(|class| {
            class
                .iter()
                .enumerate()
                .flat_map(move |(i, &a)| class[i + 1..].iter().map(move |&b| (a, b)))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Runs P1..P5 on `measure`.
///
/// P1 and P2 cover every ordered pair when `n² ≤ trials`, otherwise
/// `trials` sampled pairs. P5 uses `trials` sampled triples. P3 uses the
/// twins of `g` plus `extra_pairs`; P4 pairs each of those with sampled
/// third nodes.
pub fn axiom_battery(
    measure: &dyn SimilarityMeasure,
    g: &Graph,
    extra_pairs: &[(usize, usize)],
    trials: usize,
    seed: u64,
) -> AxiomReport {
    let n = measure.n();
    assert_eq!(n, g.n(), "measure and graph disagree on node count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p1 = AxiomCheck::new("P1");
    let mut p2 = AxiomCheck::new("P2");
    let mut check_pair = |u: usize, v: usize| {
        let s = measure.score(u, v);
        p1.record((0.0..=1.0).contains(&s), || format!("sim({u}, {v}) = {s}"));
        let t = measure.score(v, u);
        p2.record((s - t).abs() <= AXIOM_TOLERANCE, || {
            format!("sim({u}, {v}) = {s} but sim({v}, {u}) = {t}")
        });
    };
    if n.saturating_mul(n) <= trials {
        for u in 0..n {
            for v in 0..n {
                check_pair(u, v);
            }
        }
    } else {
        for _ in 0..trials {
            check_pair(rng.random_range(0..n), rng.random_range(0..n));
        }
    }

    let mut pairs = automorphic_twins(g);
    pairs.extend(extra_pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))));
    pairs.sort_unstable();
    pairs.dedup();

    let mut p3 = AxiomCheck::new("P3");
    for &(u, v) in &pairs {
        let s = measure.score(u, v);
        p3.record((s - 1.0).abs() <= AXIOM_TOLERANCE, || format!("sim({u}, {v}) = {s}, automorphic"));
    }

    let mut p4 = AxiomCheck::new("P4");
    if !pairs.is_empty() {
        let per_pair = (trials / pairs.len()).clamp(1, n);
        for &(u, u2) in &pairs {
            for i in 0..per_pair {
                let v = if per_pair == n { i } else { rng.random_range(0..n) };
                let (a, b) = (measure.score(u, v), measure.score(u2, v));
                p4.record((a - b).abs() <= AXIOM_TOLERANCE, || {
                    format!("sim({u}, {v}) = {a} but sim({u2}, {v}) = {b}")
                });
            }
        }
    }

    let mut p5 = AxiomCheck::new("P5");
    for _ in 0..trials {
        let (u, w, v) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        let dist = |a, b| 1.0 - measure.score(a, b);
        let (direct, via) = (dist(u, v), dist(u, w) + dist(w, v));
        p5.record(direct <= via + AXIOM_TOLERANCE, || {
            format!("dist({u}, {v}) = {direct} > dist({u}, {w}) + dist({w}, {v}) = {via}")
        });
    }

    AxiomReport {
        measure: measure.name(),
        automorphic_pairs: pairs,
        checks: vec![p1, p2, p3, p4, p5],
    }
}
