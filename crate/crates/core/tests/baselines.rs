use forestsim::baselines::structsim::{structsim_topk_counted, DEFAULT_LEVELS};
use forestsim::baselines::{
    rolesim_compute, rolesim_topk, structsim_build_index, structsim_score, structsim_topk, RoleSimConfig,
};
use forestsim::datasets::toy_graph;
use forestsim::eval::{automorphic_twins, axiom_battery};
use forestsim::generators;

fn sorted_row(n: usize, u: usize, k: usize, score: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut others: Vec<usize> = (0..n).filter(|&v| v != u).collect();
    others.sort_by(|&a, &b| score(b).partial_cmp(&score(a)).unwrap().then(a.cmp(&b)));
    others.truncate(k);
    others
}

#[test]
fn rolesim_toy_graph() {
    let (g, _) = toy_graph();
    let cfg = RoleSimConfig {
        max_iterations: 200,
        convergence_tol: 1e-6,
        ..Default::default()
    };
    let s = rolesim_compute(&g, &cfg).unwrap();
    assert!((s.score(2, 3) - 1.0).abs() < 1e-9);
    assert_eq!(rolesim_topk(&s, 2, 1).unwrap().nodes(), vec![3]);
    assert_eq!(rolesim_topk(&s, 0, 3).unwrap().hits.len(), 3);
}

#[test]
fn rolesim_on_random_graph() {
    let g = generators::gnm(50, 110, 17);
    let s = rolesim_compute(&g, &RoleSimConfig::default()).unwrap();
    for u in 0..50 {
        for k in [1, 5, 49] {
            let got = rolesim_topk(&s, u, k).unwrap().nodes();
            assert_eq!(got, sorted_row(50, u, k, |v| s.score(u, v)));
        }
    }
    let report = axiom_battery(&s, &g, &[], 3000, 2);
    for p in ["P1", "P2", "P3", "P4"] {
        assert!(report.check(p).passed(), "{p}: {:?}", report.check(p));
    }
    for w in s.deltas[1..].windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
}

#[test]
fn structsim_on_random_graph() {
    let g = generators::gnm(50, 110, 17);
    let idx = structsim_build_index(&g, DEFAULT_LEVELS).unwrap();
    for u in 0..50 {
        for k in [1, 5, 49] {
            let got = structsim_topk(&idx, u, k).unwrap().nodes();
            assert_eq!(got, sorted_row(50, u, k, |v| structsim_score(&idx, u, v).unwrap()));
        }
    }
    let report = axiom_battery(&idx, &g, &[], 3000, 2);
    for p in ["P1", "P2", "P3"] {
        assert!(report.check(p).passed(), "{p}: {:?}", report.check(p));
    }
    for (u, v) in automorphic_twins(&g) {
        assert_eq!(structsim_score(&idx, u, v).unwrap(), 1.0);
    }
}

#[test]
fn structsim_toy_query() {
    let (g, _) = toy_graph();
    let idx = structsim_build_index(&g, DEFAULT_LEVELS).unwrap();
    assert_eq!(structsim_topk(&idx, 2, 1).unwrap().nodes(), vec![3]);
    assert_eq!(structsim_topk(&idx, 0, 3).unwrap().hits.len(), 3);
}

#[test]
fn structsim_query_work_is_linear() {
    for n in [100, 1000, 5000] {
        let g = generators::gnm(n, 2 * n, 1);
        let idx = structsim_build_index(&g, DEFAULT_LEVELS).unwrap();
        let (_, work) = structsim_topk_counted(&idx, 0, 10).unwrap();
        assert_eq!(work, n - 1);
    }
}
