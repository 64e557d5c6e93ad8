//! The linear-algebra paths against brute-force forest enumeration.

use forestsim::generators::{self, all_graphs, is_connected};
use forestsim::oracle::{average_root_tree_size, enumerate_rooted_forests, shifted_laplacian_determinant};
use forestsim::{compute_forest_matrix_exact, forest_diag_exact, Graph};
use proptest::prelude::*;

fn check_against_oracle(g: &Graph) {
    let ens = enumerate_rooted_forests(g).unwrap();
    assert_eq!(ens.total as i128, shifted_laplacian_determinant(g));
    let w = compute_forest_matrix_exact(g).unwrap();
    let total = ens.total as f64;
    for i in 0..g.n() {
        for j in 0..g.n() {
            let counted = ens.joint_count(i, j) as f64 / total;
            assert!((counted - w.get(i, j)).abs() <= 1e-9, "W[{i}][{j}] on {:?}", g.edges());
        }
        let s = average_root_tree_size(&ens, i);
        assert!((s * w.get(i, i) - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn every_connected_graph_up_to_six_nodes() {
    let mut checked = 0;
    for n in 1..=6 {
        for g in all_graphs(n).filter(is_connected) {
            check_against_oracle(&g);
            checked += 1;
        }
    }
    // 1 + 1 + 4 + 38 + 728 + 26704 connected labelled graphs
    assert_eq!(checked, 27476);
}

#[test]
fn disconnected_graphs_multiply() {
    // |F| factorizes over components
    let g = Graph::from_edges(5, [(0, 1), (2, 3), (3, 4)]).unwrap();
    let ens = enumerate_rooted_forests(&g).unwrap();
    assert_eq!(ens.total, 3 * 8);
    check_against_oracle(&g);
}

#[test]
fn named_families() {
    for g in [generators::path(8), generators::cycle(7), generators::star(6), generators::complete(5)] {
        check_against_oracle(&g);
    }
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..=7).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (Just(n), proptest::collection::vec(any::<bool>(), pairs)).prop_map(|(n, mask)| {
            let edges = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .zip(mask)
                .filter(|(_, keep)| *keep)
                .map(|(e, _)| e);
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn random_small_graphs(g in small_graph()) {
        check_against_oracle(&g);
        let d = forest_diag_exact(&g).unwrap();
        let w = compute_forest_matrix_exact(&g).unwrap();
        for (u, x) in d.iter().enumerate() {
            prop_assert!((x - w.get(u, u)).abs() < 1e-14);
        }
    }
}
