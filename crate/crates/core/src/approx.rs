//! Approximate forest-matrix diagonal by random projection.
//!
//! Since `W (I + L) W = W` and `L = BᵀB`,
//!
//! ```text
//! w_uu = ‖W e_u‖² + ‖B W e_u‖²
//! ```
//!
//! Both norms are preserved up to `1 ± ε` by a `k × n` (resp. `k × m`)
//! Rademacher projection with `k = O(ε⁻² log n)` rows. Each projected row
//! costs one solve with `I + L`:
//!
//! ```text
//! (I + L) y_i = Q1ᵀ row i       (I + L) z_i = Bᵀ (Q2ᵀ row i)
//! w̃_uu = Σ_i y_i[u]² + z_i[u]²
//! ```
//!
//! The solves run through a Jacobi-preconditioned conjugate gradient that
//! advances [`LANES`] right-hand sides together, so each sweep over the
//! adjacency serves several systems at once.
//!
//! When the sketch would need at least `n` rows it is no cheaper than solving
//! for every unit vector, so the diagonal is then computed from `n` solves
//! `(I + L) x = e_u` instead, which is exact up to solver tolerance.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{ForestSimError, Result};
use crate::graph::Graph;

/// Right-hand sides advanced together by the block solver.
pub const LANES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    /// Relative error target, in `(0, 0.5)`.
    pub epsilon: f64,
    /// `C` in `k = ceil(C ln n / ε²)`.
    pub jl_constant: f64,
    /// Relative residual target of every linear solve.
    pub solver_rel_tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            jl_constant: 4.0,
            solver_rel_tol: 1e-8,
            max_iterations: 1000,
            seed: 0,
        }
    }
}

impl ApproxConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(ForestSimError::Config(format!(
                "epsilon must lie in (0, 0.5), got {}",
                self.epsilon
            )));
        }
        if !(self.jl_constant > 0.0 && self.jl_constant.is_finite()) {
            return Err(ForestSimError::Config(format!(
                "jl_constant must be positive, got {}",
                self.jl_constant
            )));
        }
        if !(self.solver_rel_tol > 0.0) {
            return Err(ForestSimError::Config(format!(
                "solver_rel_tol must be positive, got {}",
                self.solver_rel_tol
            )));
        }
        if self.max_iterations == 0 {
            return Err(ForestSimError::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    /// Rows of each projection matrix for a graph on `n` nodes.
    pub fn sketch_rows(&self, n: usize) -> usize {
        let k = (self.jl_constant * (n as f64).ln() / (self.epsilon * self.epsilon)).ceil();
        (k as usize).max(1)
    }

    /// True when the sketch is replaced by `n` unit-vector solves.
    pub fn uses_unit_basis(&self, n: usize) -> bool {
        self.sketch_rows(n) >= n
    }
}

pub fn approx_forest_diag(g: &Graph, cfg: &ApproxConfig) -> Result<Vec<f64>> {
    approx_forest_diag_with(g, cfg, &Budget::unlimited())
}

pub fn approx_forest_diag_with(g: &Graph, cfg: &ApproxConfig, budget: &Budget) -> Result<Vec<f64>> {
    let raw = approx_forest_diag_unclamped(g, cfg, budget)?;
    Ok(clamp_to_degree_bounds(g, raw))
}

/// The estimate before clamping into `[1/(d+1), 2/(d+2)]`. Unlike the
/// clamped value, its mean over seeds is the exact diagonal.
pub fn approx_forest_diag_unclamped(g: &Graph, cfg: &ApproxConfig, budget: &Budget) -> Result<Vec<f64>> {
    cfg.validate()?;
    let solver = BlockPcg::new(g, cfg.solver_rel_tol, cfg.max_iterations);
    if cfg.uses_unit_basis(g.n()) {
        unit_basis_diag(&solver, budget)
    } else {
        sketched_diag(&solver, cfg, budget)
    }
}

/// Solves `(I + L) x = b` to `‖(I + L) x - b‖ <= rel_tol ‖b‖`.
pub fn solve_shifted_laplacian(g: &Graph, b: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if b.len() != g.n() {
        return Err(ForestSimError::Dimension {
            expected: g.n(),
            actual: b.len(),
        });
    }
    let solver = BlockPcg::new(g, rel_tol, max_iter);
    let mut ws = Workspace::new(g.n());
    for (r, &v) in ws.rhs.iter_mut().zip(b) {
        r[0] = v;
    }
    solver.solve_in_place(&mut ws)?;
    Ok(ws.x.iter().map(|x| x[0]).collect())
}

fn unit_basis_diag(solver: &BlockPcg<'_>, budget: &Budget) -> Result<Vec<f64>> {
    let n = solver.g.n();
    let batches: Vec<usize> = (0..n).step_by(LANES).collect();
    let parts = batches
        .par_iter()
        .map_init(
            || Workspace::new(n),
            |ws, &start| {
                budget.check()?;
                let lanes = LANES.min(n - start);
                ws.rhs.fill(Block::ZERO);
                for l in 0..lanes {
                    ws.rhs[start + l][l] = 1.0;
                }
                solver.solve_in_place(ws)?;
                Ok((0..lanes).map(|l| ws.x[start + l][l]).collect::<Vec<f64>>())
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.concat())
}

/// Identifies one projection row: `Q1` rows draw `n` signs, `Q2` rows `m`.
#[derive(Clone, Copy)]
enum SketchRow {
    Node(u64),
    Edge(u64),
}

fn sketched_diag(solver: &BlockPcg<'_>, cfg: &ApproxConfig, budget: &Budget) -> Result<Vec<f64>> {
    let g = solver.g;
    let n = g.n();
    let k = cfg.sketch_rows(n);
    let scale = 1.0 / (k as f64).sqrt();
    let mut rows: Vec<SketchRow> = (0..k as u64).map(SketchRow::Node).collect();
    if g.m() > 0 {
        rows.extend((0..k as u64).map(SketchRow::Edge));
    }
    let batches: Vec<&[SketchRow]> = rows.chunks(LANES).collect();
    let group = 2 * rayon::current_num_threads().max(1);

    let mut acc = vec![0.0; n];
    for window in batches.chunks(group) {
        budget.check()?;
        let partials = window
            .par_iter()
            .map_init(
                || Workspace::new(n),
                |ws, batch| {
                    ws.rhs.fill(Block::ZERO);
                    for (lane, &row) in batch.iter().enumerate() {
                        fill_sketch_rhs(g, cfg.seed, row, scale, lane, &mut ws.rhs);
                    }
                    solver.solve_in_place(ws)?;
                    Ok(ws.x.iter().map(|xu| xu.iter().map(|v| v * v).sum::<f64>()).collect::<Vec<f64>>())
                },
            )
            .collect::<Result<Vec<_>>>()?;
        // fixed summation order keeps the result independent of scheduling
        for part in partials {
            for (a, p) in acc.iter_mut().zip(part) {
                *a += p;
            }
        }
    }
    Ok(acc)
}

/// Writes projection row `row` (scaled by `scale`) into lane `lane` of the
/// right-hand side. Each row reads its own ChaCha8 stream, so the sketch does
/// not depend on the order in which rows are processed.
fn fill_sketch_rhs(g: &Graph, seed: u64, row: SketchRow, scale: f64, lane: usize, rhs: &mut [Block]) {
    let (stream, len) = match row {
        SketchRow::Node(i) => (i << 1, g.n()),
        SketchRow::Edge(i) => ((i << 1) | 1, g.m()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut bits = 0u64;
    let mut sign = |idx: usize| -> f64 {
        if idx % 64 == 0 {
            bits = rng.next_u64();
        }
        if bits >> (idx % 64) & 1 == 1 {
            scale
        } else {
            -scale
        }
    };
    match row {
        SketchRow::Node(_) => {
            for (u, r) in rhs.iter_mut().enumerate().take(len) {
                r[lane] = sign(u);
            }
        }
        SketchRow::Edge(_) => {
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                let s = sign(e);
                rhs[u as usize][lane] += s;
                rhs[v as usize][lane] -= s;
            }
        }
    }
}

/// Clamps each estimate into `[1/(d+1), 2/(d+2)]`, the interval the true
/// diagonal entry always lies in.
fn clamp_to_degree_bounds(g: &Graph, mut w: Vec<f64>) -> Vec<f64> {
    for (u, (wu, d)) in w.iter_mut().zip(g.degrees()).enumerate() {
        if !(*wu > 0.0 && wu.is_finite()) {
            log::warn!("numerical anomaly: raw diagonal estimate {wu} at node {u}");
        }
        let d = d as f64;
        let (lo, hi) = (1.0 / (d + 1.0), 2.0 / (d + 2.0));
        *wu = if wu.is_nan() { lo } else { wu.clamp(lo, hi) };
    }
    w
}

/// Jacobi-preconditioned conjugate gradient on `I + L`, run independently on
/// `B` right-hand sides stored node-major (`rhs[u][lane]`).
struct BlockPcg<'a> {
    g: &'a Graph,
    inv_diag: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
}

impl<'a> BlockPcg<'a> {
    fn new(g: &'a Graph, rel_tol: f64, max_iter: usize) -> Self {
        Self {
            g,
            inv_diag: g.degrees().map(|d| 1.0 / (1.0 + d as f64)).collect(),
            rel_tol,
            max_iter,
        }
    }

    /// Solves for `ws.rhs`, leaving the solution in `ws.x`.
    fn solve_in_place(&self, ws: &mut Workspace) -> Result<()> {
        let g = self.g;
        let n = g.n();
        let Workspace { rhs, x, r, p, q } = ws;
        x.fill(Block::ZERO);
        r.copy_from_slice(rhs);

        let mut b_norm = [0.0; LANES];
        let mut rz = [0.0; LANES];
        for u in 0..n {
            for l in 0..LANES {
                let z = self.inv_diag[u] * r[u][l];
                p[u][l] = z;
                rz[l] += r[u][l] * z;
                b_norm[l] += r[u][l] * r[u][l];
            }
        }
        let mut active = [false; LANES];
        let mut threshold = [0.0; LANES];
        for l in 0..LANES {
            b_norm[l] = b_norm[l].sqrt();
            threshold[l] = self.rel_tol * b_norm[l];
            active[l] = b_norm[l] > 0.0;
        }

        let mut residual = b_norm;
        let mut iterations = 0;
        while active.iter().any(|&a| a) {
            if iterations == self.max_iter {
                let worst = (0..LANES)
                    .filter(|&l| active[l])
                    .map(|l| residual[l] / b_norm[l])
                    .fold(0.0, f64::max);
                return Err(ForestSimError::NoConvergence {
                    iterations,
                    residual: worst,
                });
            }
            iterations += 1;

            let mut pq = [0.0; LANES];
            for u in 0..n {
                let nbrs = g.neighbors(u);
                let mut acc = p[u];
                let deg1 = (1 + nbrs.len()) as f64;
                for l in 0..LANES {
                    acc[l] *= deg1;
                }
                for &v in nbrs {
                    let pv = &p[v as usize];
                    for l in 0..LANES {
                        acc[l] -= pv[l];
                    }
                }
                for l in 0..LANES {
                    pq[l] += p[u][l] * acc[l];
                }
                q[u] = acc;
            }

            let mut alpha = [0.0; LANES];
            for l in 0..LANES {
                if active[l] {
                    alpha[l] = rz[l] / pq[l];
                }
            }
            let mut rr = [0.0; LANES];
            let mut rz_new = [0.0; LANES];
            for u in 0..n {
                let m = self.inv_diag[u];
                for l in 0..LANES {
                    x[u][l] += alpha[l] * p[u][l];
                    let ru = r[u][l] - alpha[l] * q[u][l];
                    r[u][l] = ru;
                    rr[l] += ru * ru;
                    rz_new[l] += ru * ru * m;
                }
            }

            let mut beta = [0.0; LANES];
            for l in 0..LANES {
                if !active[l] {
                    continue;
                }
                residual[l] = rr[l].sqrt();
                if residual[l] <= threshold[l] {
                    active[l] = false;
                } else {
                    beta[l] = rz_new[l] / rz[l];
                    rz[l] = rz_new[l];
                }
            }
            for u in 0..n {
                let m = self.inv_diag[u];
                for l in 0..LANES {
                    p[u][l] = m * r[u][l] + beta[l] * p[u][l];
                }
            }
        }
        Ok(())
    }
}

/// The `LANES` values of one node, one cache line wide so that gathering a
/// neighbour touches a single line.
#[derive(Clone, Copy)]
#[repr(C, align(64))]
struct Block([f64; LANES]);

impl Block {
    const ZERO: Block = Block([0.0; LANES]);
}

impl std::ops::Deref for Block {
    type Target = [f64; LANES];
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl std::ops::DerefMut for Block {
    fn deref_mut(&mut self) -> &mut Self::Target {
        &mut self.0
    }
}

/// Buffers of one block solve, reused across solves to avoid reallocating
/// (and page-faulting) them every time.
struct Workspace {
    rhs: Vec<Block>,
    x: Vec<Block>,
    r: Vec<Block>,
    p: Vec<Block>,
    q: Vec<Block>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let zeros = || vec![Block::ZERO; n];
        Self {
            rhs: zeros(),
            x: zeros(),
            r: zeros(),
            p: zeros(),
            q: zeros(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::toy_graph;
    use crate::exact::forest_diag_exact;
    use crate::generators;

    #[test]
    fn config_validation() {
        assert!(ApproxConfig::default().validate().is_ok());
        for eps in [0.0, 0.5, -0.1, f64::NAN] {
            let cfg = ApproxConfig {
                epsilon: eps,
                ..Default::default()
            };
            assert!(cfg.validate().is_err(), "{eps}");
        }
        let cfg = ApproxConfig {
            solver_rel_tol: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ApproxConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sketch_rows_formula() {
        let cfg = ApproxConfig::default();
        assert_eq!(cfg.sketch_rows(1), 1);
        // ceil(4 ln(1e5) / 0.01)
        assert_eq!(cfg.sketch_rows(100_000), 4606);
        assert!(cfg.uses_unit_basis(2000));
        assert!(!cfg.uses_unit_basis(5000));
    }

    #[test]
    fn solver_examples() {
        let (g, _) = toy_graph();
        let x = solve_shifted_laplacian(&g, &[1.0; 4], 1e-12, 100).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let x = solve_shifted_laplacian(&g, &[1.0, 0.0, 0.0, 0.0], 1e-12, 100).unwrap();
        for (v, e) in x.iter().zip([0.4, 0.2, 0.2, 0.2]) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(
            solve_shifted_laplacian(&g, &[0.0; 4], 1e-8, 10).unwrap(),
            vec![0.0; 4]
        );
        assert!(matches!(
            solve_shifted_laplacian(&g, &[1.0; 3], 1e-8, 10),
            Err(ForestSimError::Dimension { .. })
        ));
    }

    #[test]
    fn solver_reports_non_convergence() {
        let g = generators::gnm(200, 600, 1);
        let b: Vec<f64> = (0..200).map(|i| (i as f64).sin()).collect();
        match solve_shifted_laplacian(&g, &b, 1e-12, 2) {
            Err(ForestSimError::NoConvergence { iterations: 2, residual }) => assert!(residual > 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unit_basis_path_is_exact() {
        let (g, _) = toy_graph();
        let w = approx_forest_diag(&g, &ApproxConfig::default().with_seed(11)).unwrap();
        for (v, e) in w.iter().zip([0.4, 0.6, 0.475, 0.475]) {
            assert!((v - e).abs() < 1e-8);
        }
        let single = Graph::from_edges(1, []).unwrap();
        for seed in 0..5 {
            let w = approx_forest_diag(&single, &ApproxConfig::default().with_seed(seed)).unwrap();
            assert_eq!(w, vec![1.0]);
        }
    }

    #[test]
    fn sketch_is_deterministic_and_close() {
        let g = generators::gnm(300, 900, 5);
        let cfg = ApproxConfig {
            jl_constant: 1.0,
            epsilon: 0.2,
            seed: 3,
            ..Default::default()
        };
        assert!(!cfg.uses_unit_basis(g.n()));
        let a = approx_forest_diag(&g, &cfg).unwrap();
        let b = approx_forest_diag(&g, &cfg).unwrap();
        assert_eq!(a, b);
        let c = approx_forest_diag(&g, &cfg.with_seed(4)).unwrap();
        assert_ne!(a, c);
        let exact = forest_diag_exact(&g).unwrap();
        let worst = a
            .iter()
            .zip(&exact)
            .map(|(x, e)| (x - e).abs() / e)
            .fold(0.0, f64::max);
        assert!(worst < 0.5, "worst relative error {worst}");
        assert!(a.iter().all(|&x| x > 0.0 && x <= 1.0));
    }

    #[test]
    fn edgeless_graph_sketch() {
        // with no edges the Q2 term vanishes and w = 1 after clamping
        let g = Graph::from_edges(500, []).unwrap();
        let cfg = ApproxConfig {
            jl_constant: 0.5,
            epsilon: 0.3,
            ..Default::default()
        };
        assert!(!cfg.uses_unit_basis(g.n()));
        assert_eq!(approx_forest_diag(&g, &cfg).unwrap(), vec![1.0; 500]);
    }
}
