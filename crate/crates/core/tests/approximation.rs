use forestsim::generators;
use forestsim::{
    approx_forest_diag, approx_forest_diag_unclamped, forest_diag_exact, solve_shifted_laplacian, ApproxConfig, Budget,
    ForestSimError,
};

fn sketching(epsilon: f64, jl_constant: f64, seed: u64) -> ApproxConfig {
    ApproxConfig {
        epsilon,
        jl_constant,
        seed,
        ..ApproxConfig::default()
    }
}

#[test]
fn sketch_is_mostly_within_epsilon() {
    let g = generators::gnm(600, 1500, 21);
    let exact = forest_diag_exact(&g).unwrap();
    // 320 sketch rows, well below n
    let cfg = sketching(0.2, 2.0, 5);
    assert!(!cfg.uses_unit_basis(g.n()));
    let approx = approx_forest_diag(&g, &cfg).unwrap();
    let within = exact
        .iter()
        .zip(&approx)
        .filter(|(e, a)| ((*a - *e) / *e).abs() <= 0.2)
        .count();
    assert!(within as f64 >= 0.95 * g.n() as f64, "{within} of {}", g.n());
}

#[test]
fn unit_basis_agrees_with_cholesky() {
    let g = generators::gnm(300, 900, 2);
    let cfg = ApproxConfig::default();
    assert!(cfg.uses_unit_basis(g.n()));
    let approx = approx_forest_diag(&g, &cfg).unwrap();
    for (a, e) in approx.iter().zip(forest_diag_exact(&g).unwrap()) {
        assert!((a - e).abs() <= 1e-7 * e);
    }
}

#[test]
fn same_seed_same_bits() {
    let g = generators::gnm(400, 1000, 8);
    let cfg = sketching(0.3, 1.0, 99);
    let a = approx_forest_diag(&g, &cfg).unwrap();
    let b = approx_forest_diag(&g, &cfg).unwrap();
    assert_eq!(a, b);
    let c = approx_forest_diag(&g, &cfg.with_seed(100)).unwrap();
    assert_ne!(a, c);
}

#[test]
fn mean_over_seeds_is_unbiased() {
    let g = generators::gnm(80, 200, 4);
    let exact = forest_diag_exact(&g).unwrap();
    let seeds = 200;
    let mut mean = vec![0.0; g.n()];
    for seed in 0..seeds {
        // 22 rows per projection: noisy, but centred on the exact value
        let est = approx_forest_diag_unclamped(&g, &sketching(0.45, 1.0, seed), &Budget::unlimited()).unwrap();
        for (m, e) in mean.iter_mut().zip(est) {
            *m += e / seeds as f64;
        }
    }
    for (m, e) in mean.iter().zip(&exact) {
        assert!(((m - e) / e).abs() < 0.05, "{m} vs {e}");
    }
}

#[test]
fn solver_residual() {
    let g = generators::gnm(500, 2000, 6);
    let b: Vec<f64> = (0..500).map(|i| (i % 7) as f64 - 3.0).collect();
    let x = solve_shifted_laplacian(&g, &b, 1e-10, 500).unwrap();
    let r = g.shifted_laplacian_apply(&x).unwrap();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = r.iter().zip(&b).map(|(a, b)| a - b).collect();
    assert!(norm(&diff) <= 1e-10 * norm(&b));
    assert!(matches!(
        solve_shifted_laplacian(&g, &b, 1e-12, 1),
        Err(ForestSimError::NoConvergence { .. })
    ));
}
