//! Undirected unweighted simple graphs.
//!
//! Nodes are dense ids `0..n`. Adjacency is stored in compressed form with
//! each neighbour list sorted, and the canonical edge list keeps every edge
//! once as `(u, v)` with `u < v`. That orientation also fixes the sign
//! convention of the incidence operator `B`, so `L = BᵀB`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use sha2::{Digest, Sha256};

use crate::error::{ForestSimError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a simple graph on `n` nodes. Self-loops are dropped and
    /// duplicate or reversed edges collapse into one.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(ForestSimError::EmptyGraph);
        }
        if n > u32::MAX as usize {
            return Err(ForestSimError::Invalid(format!("{n} nodes exceed u32 ids")));
        }
        let mut canon = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(ForestSimError::UnknownNode(format!("{}", u.max(v))));
            }
            if u == v {
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            canon.insert((a as u32, b as u32));
        }
        let edges: Vec<(u32, u32)> = canon.into_iter().collect();

        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut adjacency = vec![0u32; 2 * edges.len()];
        // edges are sorted by (u, v), so pushing in this order leaves every
        // neighbour list sorted
        for &(u, v) in &edges {
            adjacency[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
        }
        for &(u, v) in &edges {
            adjacency[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for u in 0..n {
            adjacency[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        Ok(Self {
            offsets,
            adjacency,
            edges,
        })
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adjacency[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Canonical edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// `y = (I + L) x`, i.e. `y_i = (1 + d_i) x_i - sum_{j ~ i} x_j`.
    pub fn shifted_laplacian_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len(), self.n())?;
        let mut y = vec![0.0; self.n()];
        self.shifted_laplacian_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn shifted_laplacian_into(&self, x: &[f64], y: &mut [f64]) {
        for (u, yu) in y.iter_mut().enumerate() {
            let nbrs = self.neighbors(u);
            let mut acc = (1 + nbrs.len()) as f64 * x[u];
            for &v in nbrs {
                acc -= x[v as usize];
            }
            *yu = acc;
        }
    }

    /// `B x`: one entry per canonical edge `(u, v)`, equal to `x_u - x_v`.
    pub fn incidence_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len(), self.n())?;
        Ok(self
            .edges
            .iter()
            .map(|&(u, v)| x[u as usize] - x[v as usize])
            .collect())
    }

    /// `Bᵀ y` for `y` indexed by canonical edge.
    pub fn incidence_transpose_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y.len(), self.m())?;
        let mut out = vec![0.0; self.n()];
        for (&(u, v), &ye) in self.edges.iter().zip(y) {
            out[u as usize] += ye;
            out[v as usize] -= ye;
        }
        Ok(out)
    }

    fn check_len(&self, actual: usize, expected: usize) -> Result<()> {
        if actual == expected {
            Ok(())
        } else {
            Err(ForestSimError::Dimension { expected, actual })
        }
    }

    /// Writes the canonical edge list, one `u v` line per edge in sorted
    /// order. Isolated nodes are written as `u u` so that reloading the
    /// output reproduces the same node set.
    pub fn write_canonical<W: Write>(&self, map: Option<&NodeIdMap>, mut out: W) -> Result<()> {
        let name = |u: usize| -> String {
            match map {
                Some(m) => m.external(u).to_string(),
                None => u.to_string(),
            }
        };
        let mut isolated = (0..self.n()).filter(|&u| self.degree(u) == 0).peekable();
        for &(u, v) in &self.edges {
            while let Some(&i) = isolated.peek() {
                if i as u32 > u {
                    break;
                }
                writeln!(out, "{0} {0}", name(i))?;
                isolated.next();
            }
            writeln!(out, "{} {}", name(u as usize), name(v as usize))?;
        }
        for i in isolated {
            writeln!(out, "{0} {0}", name(i))?;
        }
        Ok(())
    }

    /// SHA-256 over the node count and the canonical edge list in internal
    /// ids.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update((self.n() as u64).to_le_bytes());
        hasher.update((self.m() as u64).to_le_bytes());
        for &(u, v) in &self.edges {
            hasher.update(u.to_le_bytes());
            hasher.update(v.to_le_bytes());
        }
        hasher.finalize().into()
    }
}

/// Bidirectional mapping between the tokens found in an input file and the
/// dense internal ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIdMap {
    to_external: Vec<String>,
    to_internal: HashMap<String, usize>,
}

impl NodeIdMap {
    /// Assigns internal ids in sorted order of the external tokens: numeric
    /// order when every token is an integer, lexicographic otherwise.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ids: Vec<String> = tokens.into_iter().map(Into::into).collect();
        ids.sort_unstable();
        ids.dedup();
        let numeric: Option<Vec<i128>> = ids.iter().map(|s| s.parse::<i128>().ok()).collect();
        if let Some(keys) = numeric {
            let mut paired: Vec<(i128, String)> = keys.into_iter().zip(ids).collect();
            paired.sort_unstable();
            ids = paired.into_iter().map(|(_, s)| s).collect();
        }
        let to_internal = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self {
            to_external: ids,
            to_internal,
        }
    }

    /// Identity mapping `0..n`.
    pub fn identity(n: usize) -> Self {
        Self::from_tokens((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.to_external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_external.is_empty()
    }

    pub fn external(&self, internal: usize) -> &str {
        &self.to_external[internal]
    }

    pub fn internal(&self, external: &str) -> Option<usize> {
        self.to_internal.get(external).copied()
    }

    pub fn resolve(&self, external: &str) -> Result<usize> {
        self.internal(external)
            .ok_or_else(|| ForestSimError::UnknownNode(external.to_string()))
    }

    pub fn externals(&self) -> &[String] {
        &self.to_external
    }

    /// One external id per line, in internal order.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::new();
        for id in &self.to_external {
            let _ = writeln!(buf, "{id}");
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }

    /// Reads the format produced by [`NodeIdMap::write`]; the line order is
    /// taken as the internal order.
    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut to_external = Vec::new();
        let mut to_internal = HashMap::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let id = line.trim();
            if id.is_empty() {
                continue;
            }
            if to_internal.insert(id.to_string(), to_external.len()).is_some() {
                return Err(ForestSimError::Parse {
                    line: idx + 1,
                    message: format!("duplicate node id {id}"),
                });
            }
            to_external.push(id.to_string());
        }
        Ok(Self {
            to_external,
            to_internal,
        })
    }
}

/// Parses a whitespace-delimited edge list. Lines starting with `#` or `%`
/// and blank lines are skipped; every other line must hold exactly two node
/// tokens.
pub fn load_edge_list<R: BufRead>(input: R) -> Result<(Graph, NodeIdMap)> {
    let mut raw: Vec<(String, String)> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => raw.push((a.to_string(), b.to_string())),
            _ => {
                return Err(ForestSimError::Parse {
                    line: idx + 1,
                    message: format!("expected two node ids, found {trimmed:?}"),
                })
            }
        }
    }
    if raw.is_empty() {
        return Err(ForestSimError::EmptyGraph);
    }
    let map = NodeIdMap::from_tokens(raw.iter().flat_map(|(a, b)| [a.as_str(), b.as_str()]));
    let edges = raw
        .iter()
        .map(|(a, b)| (map.to_internal[a], map.to_internal[b]));
    let graph = Graph::from_edges(map.len(), edges)?;
    Ok((graph, map))
}
