//! Exact forest matrix `W = (I + L)^-1` through a dense Cholesky factorization.
//!
//! `I + L = R Rᵀ` with `R` lower triangular, so `W = R^-ᵀ R^-1` and
//! `w_uu = ‖R^-1 e_u‖²`. Both the diagonal and the full matrix go through the
//! columns of `R^-1`; memory is `O(n²)` and time `O(n³)`.

use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{ForestSimError, Result};
use crate::graph::Graph;

pub const DEFAULT_DENSE_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Largest node count accepted by the dense path.
    pub dense_limit: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }
}

/// Dense symmetric forest matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ForestMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }
}

pub fn compute_forest_matrix_exact(g: &Graph) -> Result<ForestMatrix> {
    compute_forest_matrix_with(g, ExactConfig::default(), &Budget::unlimited())
}

pub fn forest_diag_exact(g: &Graph) -> Result<Vec<f64>> {
    forest_diag_with(g, ExactConfig::default(), &Budget::unlimited())
}

pub fn compute_forest_matrix_with(
    g: &Graph,
    cfg: ExactConfig,
    budget: &Budget,
) -> Result<ForestMatrix> {
    let n = g.n();
    let inv = inverse_factor_columns(g, cfg, budget)?;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        budget.check()?;
        let ci = &inv[i * n..(i + 1) * n];
        for j in i..n {
            let cj = &inv[j * n..(j + 1) * n];
            // column c of R^-1 is zero above row c
            let w = dot(&ci[j..], &cj[j..]);
            data[i * n + j] = w;
            data[j * n + i] = w;
        }
    }
    Ok(ForestMatrix { n, data })
}

pub fn forest_diag_with(g: &Graph, cfg: ExactConfig, budget: &Budget) -> Result<Vec<f64>> {
    let n = g.n();
    check_limit(n, cfg)?;
    let factor = cholesky(g, budget)?;
    let diag = (0..n)
        .into_par_iter()
        .map(|u| {
            budget.check()?;
            let mut col = vec![0.0; n];
            lower_inverse_column(&factor, n, u, &mut col);
            Ok(col[u..].iter().map(|x| x * x).sum())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(diag)
}

fn check_limit(n: usize, cfg: ExactConfig) -> Result<()> {
    if n > cfg.dense_limit {
        return Err(ForestSimError::SizeLimit {
            what: "exact forest matrix",
            n,
            limit: cfg.dense_limit,
            hint: "; use the approximate method",
        });
    }
    Ok(())
}

/// Columns of `R^-1`, column-major.
fn inverse_factor_columns(g: &Graph, cfg: ExactConfig, budget: &Budget) -> Result<Vec<f64>> {
    let n = g.n();
    check_limit(n, cfg)?;
    let factor = cholesky(g, budget)?;
    let mut inv = vec![0.0; n * n];
    inv.par_chunks_mut(n).enumerate().try_for_each(|(u, col)| {
        budget.check()?;
        lower_inverse_column(&factor, n, u, col);
        Ok::<(), ForestSimError>(())
    })?;
    Ok(inv)
}

/// Row-oriented Cholesky of the dense `I + L`; returns the lower factor in
/// row-major order.
fn cholesky(g: &Graph, budget: &Budget) -> Result<Vec<f64>> {
    let n = g.n();
    let mut a = vec![0.0; n * n];
    for u in 0..n {
        a[u * n + u] = 1.0 + g.degree(u) as f64;
        for &v in g.neighbors(u) {
            a[u * n + v as usize] = -1.0;
        }
    }
    for i in 0..n {
        if i % 64 == 0 {
            budget.check()?;
        }
        let (done, rest) = a.split_at_mut(i * n);
        let row_i = &mut rest[..n];
        for j in 0..i {
            let row_j = &done[j * n..j * n + j + 1];
            let s = row_i[j] - dot(&row_i[..j], &row_j[..j]);
            row_i[j] = s / row_j[j];
        }
        let s = row_i[i] - dot(&row_i[..i], &row_i[..i]);
        if s <= 0.0 {
            return Err(ForestSimError::Invalid(format!(
                "I + L lost positive definiteness at row {i}"
            )));
        }
        row_i[i] = s.sqrt();
        row_i[i + 1..].fill(0.0);
    }
    Ok(a)
}

/// Solves `R x = e_u` by forward substitution; entries above `u` stay zero.
fn lower_inverse_column(factor: &[f64], n: usize, u: usize, x: &mut [f64]) {
    x[..u].fill(0.0);
    x[u] = 1.0 / factor[u * n + u];
    for i in u + 1..n {
        let row = &factor[i * n..i * n + i + 1];
        x[i] = -dot(&row[u..i], &x[u..i]) / row[i];
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the compiler vectorise the reduction
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::toy_graph;
    use crate::generators;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn toy_forest_matrix() {
        let (g, _) = toy_graph();
        let w = compute_forest_matrix_exact(&g).unwrap();
        let expected = [
            [16.0, 8.0, 8.0, 8.0],
            [8.0, 24.0, 4.0, 4.0],
            [8.0, 4.0, 19.0, 9.0],
            [8.0, 4.0, 9.0, 19.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!(close(w.get(i, j), expected[i][j] / 40.0, 1e-12), "({i},{j})");
            }
        }
    }

    #[test]
    fn small_closed_forms() {
        let single = Graph::from_edges(1, []).unwrap();
        assert_eq!(compute_forest_matrix_exact(&single).unwrap().row(0), &[1.0]);
        let k2 = generators::complete(2);
        let w = compute_forest_matrix_exact(&k2).unwrap();
        assert!(close(w.get(0, 0), 2.0 / 3.0, 1e-15) && close(w.get(0, 1), 1.0 / 3.0, 1e-15));
        let d = forest_diag_exact(&generators::complete(3)).unwrap();
        assert!(d.iter().all(|&x| close(x, 0.5, 1e-15)));
        assert_eq!(forest_diag_exact(&generators::path(1)).unwrap(), vec![1.0]);
    }

    #[test]
    fn toy_diagonal() {
        let (g, _) = toy_graph();
        let d = forest_diag_exact(&g).unwrap();
        for (x, e) in d.iter().zip([0.4, 0.6, 0.475, 0.475]) {
            assert!(close(*x, e, 1e-12));
        }
    }

    #[test]
    fn inverse_residual_and_row_sums() {
        let g = generators::gnm(60, 150, 9);
        let w = compute_forest_matrix_exact(&g).unwrap();
        let mut col = vec![0.0; g.n()];
        for j in 0..g.n() {
            for i in 0..g.n() {
                col[i] = w.get(i, j);
            }
            let back = g.shifted_laplacian_apply(&col).unwrap();
            for (i, b) in back.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!(close(*b, e, 1e-9));
            }
        }
        for i in 0..g.n() {
            assert!(close(w.row(i).iter().sum::<f64>(), 1.0, 1e-9));
            assert!(w.row(i).iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
        let d = forest_diag_exact(&g).unwrap();
        for (a, b) in d.iter().zip(w.diagonal()) {
            assert!(close(*a, b, 1e-14));
        }
    }

    #[test]
    fn size_limit() {
        let g = generators::path(30);
        let err = forest_diag_with(&g, ExactConfig { dense_limit: 20 }, &Budget::unlimited())
            .unwrap_err();
        assert!(matches!(err, ForestSimError::SizeLimit { n: 30, limit: 20, .. }));
        assert!(err.to_string().contains("approximate"));
    }
}
