//! Role similarity from spanning rooted forests.
//!
//! A node's structural role is summarised by the diagonal entry `w_uu` of the
//! forest matrix `W = (I + L)^-1`. Two nodes are compared through
//! `min(w_uu, w_vv) / max(w_uu, w_vv)`, which is an admissible role similarity
//! metric. Sorting nodes by `w_uu` once makes every top-k query a two-cursor
//! walk of `O(k)` steps.
//!
//! Layout:
//!
//! - [`graph`]: simple undirected graphs, edge-list ingestion, matrix-free
//!   `I + L` and incidence operators.
//! - [`exact`]: dense forest matrix and its diagonal.
//! - [`oracle`]: brute-force spanning rooted forest enumeration and exact
//!   determinants, used as ground truth on tiny graphs.
//! - [`approx`]: random-projection estimate of the diagonal backed by a
//!   preconditioned conjugate gradient solver.
//! - [`search`]: the sorted index, pairwise scores, top-k search and the
//!   binary index format.
//! - [`baselines`]: RoleSim and a StructSim-style BinCount measure.
//! - [`eval`]: labelled graphs, Average Precision@K and the axiom battery.

pub mod approx;
pub mod baselines;
pub mod budget;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod search;

pub use approx::{approx_forest_diag, approx_forest_diag_unclamped, solve_shifted_laplacian, ApproxConfig};
pub use budget::Budget;
pub use error::{ForestSimError, Result};
pub use exact::{compute_forest_matrix_exact, forest_diag_exact, ExactConfig, ForestMatrix};
pub use graph::{load_edge_list, Graph, NodeIdMap};
pub use oracle::{average_root_tree_size, enumerate_rooted_forests, ForestEnsemble};
pub use search::{build_index, ForestIndex, Hit, MethodTag, TopKResult};
