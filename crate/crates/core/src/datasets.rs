//! Small bundled datasets.
//!
//! Only the toy graph and Zachary's karate club ship with the crate; larger
//! benchmark graphs are read from edge-list files.

use crate::eval::LabeledGraph;
use crate::graph::{load_edge_list, Graph, NodeIdMap};

/// The four-node toy graph with edges 1-2, 1-3, 1-4, 3-4.
pub const TOY_EDGES: &str = "1 2\n1 3\n1 4\n3 4\n";

/// Zachary's karate club, 34 members and 78 friendships, ids 1..=34.
pub const KARATE_EDGES: &str = "\
1 2\n\
1 3\n\
1 4\n\
1 5\n\
1 6\n\
1 7\n\
1 8\n\
1 9\n\
1 11\n\
1 12\n\
1 13\n\
1 14\n\
1 18\n\
1 20\n\
1 22\n\
1 32\n\
2 3\n\
2 4\n\
2 8\n\
2 14\n\
2 18\n\
2 20\n\
2 22\n\
2 31\n\
3 4\n\
3 8\n\
3 9\n\
3 10\n\
3 14\n\
3 28\n\
3 29\n\
3 33\n\
4 8\n\
4 13\n\
4 14\n\
5 7\n\
5 11\n\
6 7\n\
6 11\n\
6 17\n\
7 17\n\
9 31\n\
9 33\n\
9 34\n\
10 34\n\
14 34\n\
15 33\n\
15 34\n\
16 33\n\
16 34\n\
19 33\n\
19 34\n\
20 34\n\
21 33\n\
21 34\n\
23 33\n\
23 34\n\
24 26\n\
24 28\n\
24 30\n\
24 33\n\
24 34\n\
25 26\n\
25 28\n\
25 32\n\
26 32\n\
27 30\n\
27 34\n\
28 34\n\
29 32\n\
29 34\n\
30 33\n\
30 34\n\
31 33\n\
31 34\n\
32 33\n\
32 34\n\
33 34\n";

pub fn toy_graph() -> (Graph, NodeIdMap) {
    load_edge_list(TOY_EDGES.as_bytes()).expect("bundled toy graph parses")
}

pub fn karate() -> (Graph, NodeIdMap) {
    load_edge_list(KARATE_EDGES.as_bytes()).expect("bundled karate graph parses")
}

/// Role labels for the karate club derived from degree tiers: `hub` for
/// degree at least 9, `broker` for 4 to 8, `peripheral` for 3 or less.
///
/// These are a reproducible stand-in for role annotations, not labels
/// curated by hand.
pub fn karate_role_labels() -> String {
    let (g, map) = karate();
    (0..g.n())
        .map(|u| {
            let tier = match g.degree(u) {
                d if d >= 9 => "hub",
                d if d >= 4 => "broker",
                _ => "peripheral",
            };
            format!("{} {}\n", map.external(u), tier)
        })
        .collect()
}

pub fn karate_labeled() -> LabeledGraph {
    let (g, map) = karate();
    let labels = karate_role_labels();
    crate::eval::load_labels(labels.as_bytes(), g, &map).expect("derived labels cover every node")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn karate_shape() {
        let (g, _) = karate();
        assert_eq!((g.n(), g.m()), (34, 78));
        assert_eq!(g.max_degree(), 17);
        let lg = karate_labeled();
        assert_eq!(lg.label_names().len(), 3);
    }
}
