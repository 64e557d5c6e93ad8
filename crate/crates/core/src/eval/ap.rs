//! Average Precision@K: the mean over nodes of the fraction of a node's
//! top-K answers that share its label.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LabeledGraph;
use crate::error::{ForestSimError, Result};
use crate::search::TopKResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APEntry {
    pub k: usize,
    pub average_precision: f64,
    /// Precision of every node's top-K list, in node order.
    pub per_node: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APReport {
    pub measure: String,
    /// How the measure ordered equal scores, so results can be reproduced.
    pub tie_rule: String,
    pub entries: Vec<APEntry>,
}

impl APReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn curve(&self) -> Vec<(usize, f64)> {
        self.entries.iter().map(|e| (e.k, e.average_precision)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (ties: {})\n   K  AP@K\n", self.measure, self.tie_rule);
        for e in &self.entries {
            let _ = writeln!(out, "{:>4}  {:.4}", e.k, e.average_precision);
        }
        out
    }

    /// `measure,k,average_precision` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("measure,k,average_precision\n");
        self.write_csv_rows(&mut out);
        out
    }

    pub fn write_csv_rows(&self, out: &mut String) {
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{}", self.measure, e.k, e.average_precision);
        }
    }
}

/// AP@K for one `k`. `topk(u, k)` must return exactly `k` nodes other
/// than `u`.
pub fn average_precision_at_k<F>(lg: &LabeledGraph, topk: &F, k: usize) -> Result<APEntry>
where
    F: Fn(usize, usize) -> Result<TopKResult> + Sync,
{
    let n = lg.n();
    if k == 0 || k >= n {
        return Err(ForestSimError::BadK { k, max: n.saturating_sub(1) });
    }
    let per_node = (0..n)
        .into_par_iter()
        .map(|u| {
            let result = topk(u, k)?;
            if result.hits.len() != k {
                return Err(ForestSimError::Invalid(format!(
                    "top-{k} query for node {u} returned {} nodes",
                    result.hits.len()
                )));
            }
            let mut same = 0usize;
            for hit in &result.hits {
                if hit.node == u {
                    return Err(ForestSimError::Invalid(format!("node {u} returned itself")));
                }
                let label = lg.labels().get(hit.node).ok_or_else(|| {
                    ForestSimError::Labels(format!("returned node {} has no label", hit.node))
                })?;
                if *label == lg.label(u) {
                    same += 1;
                }
            }
            Ok(same as f64 / k as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let average_precision = per_node.iter().sum::<f64>() / n as f64;
    Ok(APEntry {
        k,
        average_precision,
        per_node,
    })
}

/// AP@K for `K = 1..=k_max`.
pub fn ap_curve<F>(lg: &LabeledGraph, measure: &str, tie_rule: &str, topk: &F, k_max: usize) -> Result<APReport>
where
    F: Fn(usize, usize) -> Result<TopKResult> + Sync,
{
    let entries = (1..=k_max)
        .map(|k| average_precision_at_k(lg, topk, k))
        .collect::<Result<_>>()?;
    Ok(APReport {
        measure: measure.to_string(),
        tie_rule: tie_rule.to_string(),
        entries,
    })
}
