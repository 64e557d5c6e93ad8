//! Brute-force spanning rooted forest enumeration.
//!
//! Walks every acyclic edge subset of a tiny graph and counts, with exact
//! integers, all ways of marking one root per tree. This is the ground truth
//! the linear-algebra paths are checked against: `|F| = det(I + L)` and
//! `w_ij = |F_ij| / |F|`.

use crate::error::{ForestSimError, Result};
use crate::graph::Graph;

pub const ORACLE_MAX_NODES: usize = 10;
pub const ORACLE_MAX_EDGES: usize = 28;

/// Exact counts over the set `F` of spanning rooted forests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestEnsemble {
    n: usize,
    /// `|F|`
    pub total: u64,
    /// `|F_ii|`: forests in which `i` is a root.
    pub rooted_count: Vec<u64>,
    /// `|F_ij|` row-major: forests where `j` lies in the tree rooted at `i`.
    joint_count: Vec<u64>,
    /// `sum over F in F_ii of |F|_i`, the size of the tree rooted at `i`.
    pub root_tree_size_sum: Vec<u64>,
}

impl ForestEnsemble {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn joint_count(&self, i: usize, j: usize) -> u64 {
        self.joint_count[i * self.n + j]
    }
}

pub fn enumerate_rooted_forests(g: &Graph) -> Result<ForestEnsemble> {
    let n = g.n();
    if n > ORACLE_MAX_NODES {
        return Err(ForestSimError::SizeLimit {
            what: "forest enumeration",
            n,
            limit: ORACLE_MAX_NODES,
            hint: "",
        });
    }
    if g.m() > ORACLE_MAX_EDGES {
        return Err(ForestSimError::Invalid(format!(
            "forest enumeration: {} edges above the limit of {ORACLE_MAX_EDGES}",
            g.m()
        )));
    }
    let mut walk = Walk {
        edges: g.edges().iter().map(|&(u, v)| (u as usize, v as usize)).collect(),
        uf: RollbackUnionFind::new(n),
        ens: ForestEnsemble {
            n,
            total: 0,
            rooted_count: vec![0; n],
            joint_count: vec![0; n * n],
            root_tree_size_sum: vec![0; n],
        },
    };
    walk.descend(0);
    Ok(walk.ens)
}

/// `s(u)`: mean size of the tree rooted at `u` over the forests where `u` is
/// a root.
pub fn average_root_tree_size(ens: &ForestEnsemble, u: usize) -> f64 {
    ens.root_tree_size_sum[u] as f64 / ens.rooted_count[u] as f64
}

struct Walk {
    edges: Vec<(usize, usize)>,
    uf: RollbackUnionFind,
    ens: ForestEnsemble,
}

impl Walk {
    fn descend(&mut self, e: usize) {
        if e == self.edges.len() {
            self.record();
            return;
        }
        self.descend(e + 1);
        let (u, v) = self.edges[e];
        if self.uf.union(u, v) {
            self.descend(e + 1);
            self.uf.rollback();
        }
    }

    /// Accounts for every root marking of the current unrooted forest: each
    /// tree independently picks any of its nodes as root.
    fn record(&mut self) {
        let n = self.ens.n;
        let comp: Vec<usize> = (0..n).map(|i| self.uf.find(i)).collect();
        let size: Vec<u64> = comp.iter().map(|&c| self.uf.size[c] as u64).collect();
        let markings: u64 = (0..n).filter(|&i| comp[i] == i).map(|i| size[i]).product();
        self.ens.total += markings;
        for i in 0..n {
            // fixing i as root of its tree leaves the other trees free
            let others = markings / size[i];
            self.ens.rooted_count[i] += others;
            self.ens.root_tree_size_sum[i] += size[i] * others;
            for j in 0..n {
                if comp[j] == comp[i] {
                    self.ens.joint_count[i * n + j] += others;
                }
            }
        }
    }
}

/// Union by size without path compression, so unions can be undone.
struct RollbackUnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<(usize, usize)>,
}

impl RollbackUnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push((ra, rb));
        true
    }

    fn rollback(&mut self) {
        let (ra, rb) = self.history.pop().expect("rollback without union");
        self.parent[rb] = rb;
        self.size[ra] -= self.size[rb];
    }
}

/// `det(I + L)` by fraction-free (Bareiss) elimination in exact integers.
pub fn shifted_laplacian_determinant(g: &Graph) -> i128 {
    let n = g.n();
    let mut a = vec![vec![0i128; n]; n];
    for u in 0..n {
        a[u][u] = 1 + g.degree(u) as i128;
        for &v in g.neighbors(u) {
            a[u][v as usize] = -1;
        }
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n.saturating_sub(1) {
        if a[k][k] == 0 {
            // I + L is positive definite, so this never triggers; kept for
            // completeness of the elimination.
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}
