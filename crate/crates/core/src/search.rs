//! Sorted index over the forest-matrix diagonal and top-k search.
//!
//! With nodes sorted ascending by `w_uu`, similarity to a fixed node `u` can
//! only decrease when walking away from `u`'s position in either direction.
//! A top-k query therefore merges the two walks, taking the better of the
//! two frontier candidates at each step, and finishes after `k` steps.
//!
//! Tie rules, shared by every consumer that needs reproducible output:
//!
//! - sorting: ascending `w`, then ascending node id;
//! - cursor choice: on equal similarity the right-hand (larger `w`)
//!   candidate is taken first;
//! - an exhausted side offers similarity `-inf`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ForestSimError, Result};
use crate::graph::Graph;

const MAGIC: &[u8; 4] = b"FSIM";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum MethodTag {
    Exact,
    Approx { epsilon: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub node: usize,
    pub score: f64,
}

/// Ranked answer to one top-k query; scores are non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopKResult {
    pub query: usize,
    pub hits: Vec<Hit>,
}

impl TopKResult {
    pub fn nodes(&self) -> Vec<usize> {
        self.hits.iter().map(|h| h.node).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestIndex {
    wvec: Vec<f64>,
    avec: Vec<u32>,
    rankvec: Vec<u32>,
    fingerprint: [u8; 32],
    method: MethodTag,
}

/// Builds the index for `g` from its (exact or estimated) diagonal `w`.
pub fn build_index(g: &Graph, w: Vec<f64>, method: MethodTag) -> Result<ForestIndex> {
    if w.len() != g.n() {
        return Err(ForestSimError::Dimension {
            expected: g.n(),
            actual: w.len(),
        });
    }
    ForestIndex::new(w, g.fingerprint(), method)
}

impl ForestIndex {
    pub fn new(wvec: Vec<f64>, fingerprint: [u8; 32], method: MethodTag) -> Result<Self> {
        if wvec.is_empty() {
            return Err(ForestSimError::EmptyGraph);
        }
        if wvec.len() > u32::MAX as usize {
            return Err(ForestSimError::Invalid("too many nodes for u32 ranks".into()));
        }
        if let Some((u, w)) = wvec.iter().enumerate().find(|(_, &w)| !(w > 0.0 && w <= 1.0)) {
            return Err(ForestSimError::Invalid(format!(
                "diagonal entry {w} at node {u} outside (0, 1]"
            )));
        }
        let mut avec: Vec<u32> = (0..wvec.len() as u32).collect();
        avec.sort_unstable_by(|&a, &b| {
            wvec[a as usize]
                .total_cmp(&wvec[b as usize])
                .then(a.cmp(&b))
        });
        let rankvec = inverse_permutation(&avec);
        Ok(Self {
            wvec,
            avec,
            rankvec,
            fingerprint,
            method,
        })
    }

    pub fn n(&self) -> usize {
        self.wvec.len()
    }

    pub fn wvec(&self) -> &[f64] {
        &self.wvec
    }

    /// Nodes in ascending order of `w`.
    pub fn avec(&self) -> &[u32] {
        &self.avec
    }

    /// Position of every node in [`ForestIndex::avec`].
    pub fn rankvec(&self) -> &[u32] {
        &self.rankvec
    }

    pub fn fingerprint(&self) -> &[u8; 32] {
        &self.fingerprint
    }

    pub fn method(&self) -> MethodTag {
        self.method
    }

    fn check_node(&self, u: usize) -> Result<()> {
        if u < self.n() {
            Ok(())
        } else {
            Err(ForestSimError::UnknownNode(u.to_string()))
        }
    }

    #[inline]
    fn sim(&self, u: usize, v: usize) -> f64 {
        let (a, b) = (self.wvec[u], self.wvec[v]);
        a.min(b) / a.max(b)
    }

    /// `min(w_uu, w_vv) / max(w_uu, w_vv)`.
    pub fn forest_sim(&self, u: usize, v: usize) -> Result<f64> {
        self.check_node(u)?;
        self.check_node(v)?;
        Ok(self.sim(u, v))
    }

    /// `1 - forest_sim`, i.e. `|w_uu - w_vv| / max(w_uu, w_vv)`.
    pub fn forest_dist(&self, u: usize, v: usize) -> Result<f64> {
        self.forest_sim(u, v).map(|s| 1.0 - s)
    }

    pub fn top_k_search(&self, u: usize, k: usize) -> Result<TopKResult> {
        self.top_k_search_counted(u, k).map(|(r, _)| r)
    }

    /// Like [`ForestIndex::top_k_search`], also returning the number of
    /// similarity evaluations spent (at most `2k`).
    pub fn top_k_search_counted(&self, u: usize, k: usize) -> Result<(TopKResult, usize)> {
        self.check_node(u)?;
        let max = self.n() - 1;
        if k == 0 || k > max {
            return Err(ForestSimError::BadK { k, max });
        }
        Ok(self.walk(u, k))
    }

    fn walk(&self, u: usize, k: usize) -> (TopKResult, usize) {
        let n = self.n();
        let rank = self.rankvec[u] as usize;
        // `left` is one past the next left candidate so it never underflows
        let mut left = rank;
        let mut right = rank + 1;
        let mut evaluations = 0;
        let mut hits = Vec::with_capacity(k);
        for _ in 0..k {
            let left_sim = if left > 0 {
                evaluations += 1;
                self.sim(self.avec[left - 1] as usize, u)
            } else {
                f64::NEG_INFINITY
            };
            let right_sim = if right < n {
                evaluations += 1;
                self.sim(self.avec[right] as usize, u)
            } else {
                f64::NEG_INFINITY
            };
            if left_sim > right_sim {
                left -= 1;
                hits.push(Hit {
                    node: self.avec[left] as usize,
                    score: left_sim,
                });
            } else {
                hits.push(Hit {
                    node: self.avec[right] as usize,
                    score: right_sim,
                });
                right += 1;
            }
        }
        (TopKResult { query: u, hits }, evaluations)
    }

    /// Top-k for every node in id order. `k` above `n - 1` is clamped.
    pub fn top_k_all(&self, k: usize) -> Result<Vec<TopKResult>> {
        use rayon::prelude::*;
        if k == 0 {
            return Err(ForestSimError::BadK { k, max: self.n() - 1 });
        }
        let k = self.clamp_k(k);
        Ok((0..self.n())
            .into_par_iter()
            .map(|u| self.walk(u, k).0)
            .collect())
    }

    pub(crate) fn clamp_k(&self, k: usize) -> usize {
        let max = self.n() - 1;
        if k > max {
            log::warn!("k = {k} exceeds n - 1 = {max}; clamping");
            max
        } else {
            k
        }
    }

    pub fn verify_graph(&self, g: &Graph) -> Result<()> {
        let actual = g.fingerprint();
        if actual == self.fingerprint {
            Ok(())
        } else {
            Err(ForestSimError::Fingerprint {
                expected: to_hex(&self.fingerprint),
                actual: to_hex(&actual),
            })
        }
    }

    pub fn fingerprint_hex(&self) -> String {
        to_hex(&self.fingerprint)
    }

    /// Little-endian binary layout:
    ///
    /// ```text
    /// "FSIM" | version u32 | n u64 | method u8 (0 exact, 1 approx)
    ///        | [epsilon f64 | seed u64]   (approx only)
    ///        | fingerprint [u8; 32]
    ///        | wvec: n × f64 | avec: n × u32
    /// ```
    ///
    /// `rankvec` is rebuilt on load.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = Vec::with_capacity(64 + 12 * self.n());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n() as u64).to_le_bytes());
        match self.method {
            MethodTag::Exact => buf.push(0),
            MethodTag::Approx { epsilon, seed } => {
                buf.push(1);
                buf.extend_from_slice(&epsilon.to_le_bytes());
                buf.extend_from_slice(&seed.to_le_bytes());
            }
        }
        buf.extend_from_slice(&self.fingerprint);
        for w in &self.wvec {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        for a in &self.avec {
            buf.extend_from_slice(&a.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(ForestSimError::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(cur.array()?);
        if version != FORMAT_VERSION {
            return Err(ForestSimError::Format(format!("unsupported version {version}")));
        }
        let n = u64::from_le_bytes(cur.array()?) as usize;
        let method = match cur.take(1)?[0] {
            0 => MethodTag::Exact,
            1 => MethodTag::Approx {
                epsilon: f64::from_le_bytes(cur.array()?),
                seed: u64::from_le_bytes(cur.array()?),
            },
            t => return Err(ForestSimError::Format(format!("unknown method tag {t}"))),
        };
        let fingerprint: [u8; 32] = cur.array()?;
        let expected_len = n
            .checked_mul(12)
            .and_then(|body| body.checked_add(cur.pos))
            .ok_or_else(|| ForestSimError::Format("node count overflows".into()))?;
        if bytes.len() != expected_len {
            return Err(ForestSimError::Format(format!(
                "expected {expected_len} bytes for n = {n}, found {}",
                bytes.len()
            )));
        }
        let wvec: Vec<f64> = (0..n)
            .map(|_| cur.array().map(f64::from_le_bytes))
            .collect::<Result<_>>()?;
        let avec: Vec<u32> = (0..n)
            .map(|_| cur.array().map(u32::from_le_bytes))
            .collect::<Result<_>>()?;
        let index = Self::new(wvec, fingerprint, method)?;
        if index.avec != avec {
            return Err(ForestSimError::Format(
                "stored order disagrees with the stored diagonal".into(),
            ));
        }
        Ok(index)
    }
}

fn inverse_permutation(perm: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; perm.len()];
    for (pos, &node) in perm.iter().enumerate() {
        inv[node as usize] = pos as u32;
    }
    inv
}

pub(crate) fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos + len;
        if end > self.bytes.len() {
            return Err(ForestSimError::Format("truncated index file".into()));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::toy_graph;

    fn toy_index() -> ForestIndex {
        let (g, _) = toy_graph();
        // exact fractions, so nodes 3 and 4 tie exactly
        build_index(&g, vec![0.4, 0.6, 0.475, 0.475], MethodTag::Exact).unwrap()
    }

    fn pairs(r: &TopKResult) -> Vec<(usize, f64)> {
        r.hits.iter().map(|h| (h.node, h.score)).collect()
    }

    #[test]
    fn toy_order_and_ranks() {
        let idx = toy_index();
        assert_eq!(idx.avec(), &[0, 2, 3, 1]);
        assert_eq!(idx.rankvec(), &[0, 3, 1, 2]);
    }

    #[test]
    fn single_node_and_ties() {
        let g = Graph::from_edges(1, []).unwrap();
        let idx = build_index(&g, vec![1.0], MethodTag::Exact).unwrap();
        assert_eq!((idx.avec(), idx.rankvec()), (&[0u32][..], &[0u32][..]));
        assert!(idx.top_k_search(0, 1).is_err());
        assert_eq!(idx.top_k_all(5).unwrap()[0].hits, vec![]);

        let k3 = crate::generators::complete(3);
        let idx = build_index(&k3, vec![0.5; 3], MethodTag::Exact).unwrap();
        assert_eq!(idx.avec(), &[0, 1, 2]);
    }

    #[test]
    fn pairwise_scores() {
        let idx = toy_index();
        assert_eq!(idx.forest_sim(2, 3).unwrap(), 1.0);
        assert!((idx.forest_sim(0, 1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((idx.forest_dist(0, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(idx.forest_sim(1, 1).unwrap(), 1.0);
        assert_eq!(idx.forest_dist(1, 1).unwrap(), 0.0);
        assert!(matches!(idx.forest_sim(0, 4), Err(ForestSimError::UnknownNode(_))));
    }

    #[test]
    fn toy_queries() {
        let idx = toy_index();
        let r = idx.top_k_search(2, 2).unwrap();
        assert_eq!(r.nodes(), vec![3, 0]);
        assert_eq!(r.hits[0].score, 1.0);
        assert!((r.hits[1].score - 16.0 / 19.0).abs() < 1e-15);

        let r = idx.top_k_search(0, 3).unwrap();
        let p = pairs(&r);
        assert_eq!(r.nodes(), vec![2, 3, 1]);
        assert!((p[0].1 - 16.0 / 19.0).abs() < 1e-15 && p[0].1 == p[1].1);
        assert!((p[2].1 - 2.0 / 3.0).abs() < 1e-15);

        let all = idx.top_k_all(1).unwrap();
        let firsts: Vec<usize> = all.iter().map(|r| r.hits[0].node).collect();
        assert_eq!(firsts, vec![2, 3, 3, 2]);
    }

    #[test]
    fn k_bounds() {
        let idx = toy_index();
        assert!(matches!(idx.top_k_search(0, 0), Err(ForestSimError::BadK { k: 0, max: 3 })));
        assert!(matches!(idx.top_k_search(0, 4), Err(ForestSimError::BadK { .. })));
        assert!(idx.top_k_search(7, 1).is_err());
        // batch mode clamps
        assert!(idx.top_k_all(10).unwrap().iter().all(|r| r.hits.len() == 3));
        assert!(idx.top_k_all(0).is_err());
    }

    #[test]
    fn rejects_bad_diagonals() {
        let (g, _) = toy_graph();
        assert!(build_index(&g, vec![0.4, 0.0, 0.5, 0.5], MethodTag::Exact).is_err());
        assert!(build_index(&g, vec![0.4, f64::NAN, 0.5, 0.5], MethodTag::Exact).is_err());
        assert!(build_index(&g, vec![0.4; 3], MethodTag::Exact).is_err());
    }

    #[test]
    fn file_round_trip_and_corruption() {
        let (g, _) = toy_graph();
        let idx = build_index(
            &g,
            vec![0.4, 0.6, 0.475, 0.475],
            MethodTag::Approx { epsilon: 0.1, seed: 7 },
        )
        .unwrap();
        let mut buf = Vec::new();
        idx.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8 + 1 + 16 + 32 + 4 * 12);
        assert_eq!(ForestIndex::read_from(buf.as_slice()).unwrap(), idx);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(ForestIndex::read_from(bad.as_slice()).is_err());
        assert!(ForestIndex::read_from(&buf[..buf.len() - 1]).is_err());
        let mut swapped = buf.clone();
        let tail = swapped.len() - 16;
        swapped[tail..tail + 4].copy_from_slice(&1u32.to_le_bytes());
        assert!(ForestIndex::read_from(swapped.as_slice()).is_err());
    }

    #[test]
    fn fingerprint_check() {
        let (g, _) = toy_graph();
        let idx = toy_index();
        assert!(idx.verify_graph(&g).is_ok());
        let other = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(matches!(idx.verify_graph(&other), Err(ForestSimError::Fingerprint { .. })));
    }
}
