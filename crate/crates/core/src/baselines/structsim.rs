//! BinCount-style StructSim stand-in.
//!
//! Each node keeps, for every BFS level `0..L`, a histogram of the
//! log-binned degrees of the nodes at exactly that hop distance. Two nodes
//! are compared level by level with the normalized overlap
//! `Σ_b min(h_u[b], h_v[b]) / max(|frontier_u|, |frontier_v|)`, and the
//! levels are averaged. This is a reconstruction with the same qualitative
//! behaviour as the original measure (range `[0, 1]`, symmetric, automorphic
//! nodes score 1); it is meant for relative comparisons only.

use rayon::prelude::*;

use crate::baselines::top_k_by_scores;
use crate::budget::Budget;
use crate::error::{ForestSimError, Result};
use crate::graph::Graph;
use crate::search::TopKResult;

pub const DEFAULT_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructSimIndex {
    n: usize,
    levels: usize,
    bins: usize,
    /// `hist[(u * levels + l) * bins + b]`
    hist: Vec<u32>,
    /// `frontier[u * levels + l]`
    frontier: Vec<u32>,
}

/// Degree `d` goes to bin `floor(log2 d) + 1`; degree 0 to bin 0.
pub fn degree_bin(d: usize) -> usize {
    if d == 0 {
        0
    } else {
        d.ilog2() as usize + 1
    }
}

fn bin_count(n: usize) -> usize {
    // ceil(log2 n) + 1, and always room for the largest possible degree
    let ceil = if n <= 1 { 0 } else { (n - 1).ilog2() as usize + 1 };
    (ceil + 1).max(degree_bin(n.saturating_sub(1)) + 1)
}

impl StructSimIndex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn histogram(&self, u: usize, level: usize) -> &[u32] {
        let start = (u * self.levels + level) * self.bins;
        &self.hist[start..start + self.bins]
    }

    pub fn frontier_size(&self, u: usize, level: usize) -> usize {
        self.frontier[u * self.levels + level] as usize
    }

    fn check_node(&self, u: usize) -> Result<()> {
        if u >= self.n {
            return Err(ForestSimError::UnknownNode(u.to_string()));
        }
        Ok(())
    }

    fn pair_score(&self, u: usize, v: usize) -> f64 {
        let mut total = 0.0;
        for l in 0..self.levels {
            let (fu, fv) = (self.frontier_size(u, l), self.frontier_size(v, l));
            total += match (fu, fv) {
                (0, 0) => 1.0,
                (0, _) | (_, 0) => 0.0,
                _ => {
                    let overlap: u32 = self
                        .histogram(u, l)
                        .iter()
                        .zip(self.histogram(v, l))
                        .map(|(a, b)| *a.min(b))
                        .sum();
                    overlap as f64 / fu.max(fv) as f64
                }
            };
        }
        total / self.levels as f64
    }
}

pub fn structsim_build_index(g: &Graph, levels: usize) -> Result<StructSimIndex> {
    structsim_build_index_with(g, levels, &Budget::unlimited())
}

pub fn structsim_build_index_with(g: &Graph, levels: usize, budget: &Budget) -> Result<StructSimIndex> {
    if levels == 0 {
        return Err(ForestSimError::Config("StructSim needs at least one level".into()));
    }
    let n = g.n();
    let bins = bin_count(n);
    let stride = levels * bins;
    let mut hist = vec![0u32; n * stride];
    let mut frontier = vec![0u32; n * levels];
    hist.par_chunks_mut(stride)
        .zip(frontier.par_chunks_mut(levels))
        .enumerate()
        .try_for_each_init(
            || Bfs::new(n),
            |bfs, (u, (h, f))| {
                if u % 256 == 0 {
                    budget.check()?;
                }
                bfs.run(g, u, levels, |l, x| {
                    h[l * bins + degree_bin(g.degree(x))] += 1;
                    f[l] += 1;
                });
                Ok::<(), ForestSimError>(())
            },
        )?;
    Ok(StructSimIndex {
        n,
        levels,
        bins,
        hist,
        frontier,
    })
}

/// Reusable BFS state; the `seen` stamps avoid clearing between sources.
struct Bfs {
    seen: Vec<u32>,
    stamp: u32,
    current: Vec<u32>,
    next: Vec<u32>,
}

impl Bfs {
    fn new(n: usize) -> Self {
        Self {
            seen: vec![0; n],
            stamp: 0,
            current: Vec::new(),
            next: Vec::new(),
        }
    }

    fn run<F: FnMut(usize, usize)>(&mut self, g: &Graph, source: usize, levels: usize, mut visit: F) {
        self.stamp += 1;
        self.current.clear();
        self.current.push(source as u32);
        self.seen[source] = self.stamp;
        for l in 0..levels {
            if self.current.is_empty() {
                break;
            }
            self.next.clear();
            for &x in &self.current {
                visit(l, x as usize);
                if l + 1 < levels {
                    for &y in g.neighbors(x as usize) {
                        if self.seen[y as usize] != self.stamp {
                            self.seen[y as usize] = self.stamp;
                            self.next.push(y);
                        }
                    }
                }
            }
            std::mem::swap(&mut self.current, &mut self.next);
        }
    }
}

pub fn structsim_score(idx: &StructSimIndex, u: usize, v: usize) -> Result<f64> {
    idx.check_node(u)?;
    idx.check_node(v)?;
    Ok(idx.pair_score(u, v))
}

pub fn structsim_topk(idx: &StructSimIndex, u: usize, k: usize) -> Result<TopKResult> {
    structsim_topk_counted(idx, u, k).map(|(r, _)| r)
}

/// Top-k plus the number of pairwise scores evaluated, which is always
/// `n - 1`: every other node is compared.
pub fn structsim_topk_counted(idx: &StructSimIndex, u: usize, k: usize) -> Result<(TopKResult, usize)> {
    idx.check_node(u)?;
    let result = top_k_by_scores(idx.n, u, k, |v| idx.pair_score(u, v))?;
    Ok((result, idx.n - 1))
}
