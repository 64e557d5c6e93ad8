//! Effectiveness evaluation: labelled graphs, Average Precision@K, and the
//! role-similarity axiom checks.

mod ap;
mod axioms;

pub use ap::{ap_curve, average_precision_at_k, APEntry, APReport};
pub use axioms::{axiom_battery, automorphic_twins, AxiomCheck, AxiomReport, FnMeasure, SimilarityMeasure};

use std::collections::BTreeSet;
use std::io::BufRead;

use crate::error::{ForestSimError, Result};
use crate::graph::{Graph, NodeIdMap};

/// A graph whose nodes each carry one categorical label.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    graph: Graph,
    labels: Vec<usize>,
    label_names: Vec<String>,
}

impl LabeledGraph {
    pub fn new(graph: Graph, labels: Vec<usize>, label_names: Vec<String>) -> Result<Self> {
        if labels.len() != graph.n() {
            return Err(ForestSimError::Dimension {
                expected: graph.n(),
                actual: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= label_names.len()) {
            return Err(ForestSimError::Labels(format!("label id {bad} has no name")));
        }
        if label_names.len() < 2 {
            log::warn!("only {} distinct label(s); precision is trivially 1", label_names.len());
        }
        Ok(Self {
            graph,
            labels,
            label_names,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> usize {
        self.labels[u]
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn label_name(&self, u: usize) -> &str {
        &self.label_names[self.labels[u]]
    }
}

/// Reads `node_id label` lines (blank lines and `#`/`%` comments skipped).
/// Every node of `graph` must be labelled exactly once. Label ids follow the
/// sorted order of the label names.
pub fn load_labels<R: BufRead>(input: R, graph: Graph, map: &NodeIdMap) -> Result<LabeledGraph> {
    if map.len() != graph.n() {
        return Err(ForestSimError::Dimension {
            expected: graph.n(),
            actual: map.len(),
        });
    }
    let mut assigned: Vec<Option<String>> = vec![None; graph.n()];
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (node, label) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(ForestSimError::Parse {
                    line: idx + 1,
                    message: format!("expected `node_id label`, found {trimmed:?}"),
                })
            }
        };
        let u = map.internal(node).ok_or_else(|| {
            ForestSimError::Labels(format!("line {}: unknown node {node}", idx + 1))
        })?;
        if assigned[u].is_some() {
            return Err(ForestSimError::Labels(format!(
                "line {}: node {node} is labelled twice",
                idx + 1
            )));
        }
        assigned[u] = Some(label.to_string());
    }
    if let Some(u) = assigned.iter().position(Option::is_none) {
        return Err(ForestSimError::Labels(format!("no label for node {}", map.external(u))));
    }
    let names: Vec<String> = assigned
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let labels = assigned
        .iter()
        .map(|l| names.binary_search(l.as_ref().unwrap()).unwrap())
        .collect();
    LabeledGraph::new(graph, labels, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::toy_graph;

    #[test]
    fn labels_cover_toy_graph() {
        let (g, map) = toy_graph();
        let lg = load_labels("1 hub\n# comment\n2 leaf\n3 pair\n4 pair\n".as_bytes(), g, &map).unwrap();
        assert_eq!(lg.label_names(), &["hub", "leaf", "pair"]);
        assert_eq!(lg.labels(), &[0, 1, 2, 2]);
        assert_eq!(lg.label_name(3), "pair");
    }

    #[test]
    fn missing_node_is_named() {
        let (g, map) = toy_graph();
        let err = load_labels("1 a\n2 a\n3 b\n".as_bytes(), g, &map).unwrap_err();
        assert!(err.to_string().contains("node 4"), "{err}");
    }

    #[test]
    fn unknown_and_duplicate_nodes() {
        let (g, map) = toy_graph();
        let err = load_labels("1 a\n2 a\n3 b\n4 b\n99 c\n".as_bytes(), g.clone(), &map).unwrap_err();
        assert!(err.to_string().contains("unknown node 99"), "{err}");
        let err = load_labels("1 a\n2 a\n3 b\n4 b\n1 c\n".as_bytes(), g.clone(), &map).unwrap_err();
        assert!(err.to_string().contains("twice"), "{err}");
        let err = load_labels("1 a b\n".as_bytes(), g, &map).unwrap_err();
        assert!(matches!(err, ForestSimError::Parse { line: 1, .. }));
    }
}
