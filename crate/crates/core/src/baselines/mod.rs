//! Comparison measures: RoleSim and a BinCount-style StructSim.

pub mod assignment;
pub mod rolesim;
pub mod structsim;

pub use rolesim::{rolesim_compute, rolesim_topk, RoleSimConfig, RoleSimScores};
pub use structsim::{structsim_build_index, structsim_score, structsim_topk, StructSimIndex};

use crate::error::{ForestSimError, Result};
use crate::search::{Hit, TopKResult};

/// Exact top-k by full scoring: every `v != u` is scored, then sorted by
/// descending score with ascending id breaking ties.
pub(crate) fn top_k_by_scores<F>(n: usize, u: usize, k: usize, score: F) -> Result<TopKResult>
where
    F: Fn(usize) -> f64,
{
    if u >= n {
        return Err(ForestSimError::UnknownNode(u.to_string()));
    }
    let max = n - 1;
    if k == 0 || k > max {
        return Err(ForestSimError::BadK { k, max });
    }
    let mut scored: Vec<Hit> = (0..n)
        .filter(|&v| v != u)
        .map(|v| Hit {
            node: v,
            score: score(v),
        })
        .collect();
    let by_rank = |a: &Hit, b: &Hit| b.score.total_cmp(&a.score).then(a.node.cmp(&b.node));
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, by_rank);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_rank);
    Ok(TopKResult {
        query: u,
        hits: scored,
    })
}
