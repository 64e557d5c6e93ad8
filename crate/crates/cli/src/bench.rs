//! Timing sweep over synthetic G(n, m) graphs. Cells that run out of time
//! or exceed a measure's size limit print `---`.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Args;
use forestsim::approx::approx_forest_diag_with;
use forestsim::baselines::rolesim::rolesim_compute_with;
use forestsim::baselines::structsim::{structsim_build_index_with, structsim_topk_counted, DEFAULT_LEVELS};
use forestsim::baselines::{rolesim_topk, RoleSimConfig};
use forestsim::exact::{forest_diag_with, ExactConfig, DEFAULT_DENSE_LIMIT};
use forestsim::generators::gnm;
use forestsim::search::{build_index, MethodTag};
use forestsim::{Budget, ForestSimError, Graph};
use serde::Serialize;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{manifest_path_for, ApproxArgs, Measure, UsageError};

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![1_000, 10_000, 100_000])]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Measure::ForestsimAp])]
    pub measures: Vec<Measure>,
    /// Average degree of the generated graphs, so m = n * avg_degree / 2.
    #[arg(long, default_value_t = 4.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Query this many nodes (ids 0, 1, ...) instead of all of them.
    #[arg(long)]
    pub queries: Option<usize>,
    /// Per-cell limit in seconds, covering precomputation and queries.
    #[arg(long, default_value_t = 600.0)]
    pub timeout: f64,
    /// `--seed` also seeds the graph generator.
    #[command(flatten)]
    pub approx: ApproxArgs,
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
    #[arg(long, default_value_t = 20)]
    pub rolesim_iterations: usize,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl Default for BenchArgs {
    fn default() -> Self {
        Self {
            sizes: vec![1_000, 10_000, 100_000],
            measures: vec![Measure::ForestsimAp],
            avg_degree: 4.0,
            k: 10,
            queries: None,
            timeout: 600.0,
            approx: ApproxArgs::default(),
            dense_limit: DEFAULT_DENSE_LIMIT,
            rolesim_iterations: 20,
            out: None,
            manifest: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub measure: &'static str,
    pub n: usize,
    pub m: usize,
    /// `None` when the cell timed out or was refused.
    pub precompute_seconds: Option<f64>,
    pub query_seconds: Option<f64>,
    /// Largest number of pairwise similarity evaluations in one query.
    pub max_query_evaluations: Option<usize>,
    pub status: &'static str,
}

impl BenchRow {
    pub fn total_seconds(&self) -> Option<f64> {
        Some(self.precompute_seconds? + self.query_seconds?)
    }
}

pub const CSV_HEADER: &str = "measure,n,m,precompute_seconds,query_seconds,total_seconds,max_query_evaluations";

pub fn to_csv(rows: &[BenchRow]) -> String {
    let cell = |v: Option<f64>| v.map_or("---".to_string(), |s| format!("{s:.6}"));
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.measure,
            r.n,
            r.m,
            cell(r.precompute_seconds),
            cell(r.query_seconds),
            cell(r.total_seconds()),
            r.max_query_evaluations.map_or("---".to_string(), |c| c.to_string()),
        );
    }
    out
}

/// The graph used for size `n`; the same arguments always give the same graph.
pub fn bench_graph(n: usize, avg_degree: f64, seed: u64) -> Graph {
    let max = n * n.saturating_sub(1) / 2;
    let m = ((n as f64 * avg_degree / 2.0).round() as usize).min(max);
    gnm(n, m, seed)
}

pub struct BenchOutcome {
    pub rows: Vec<BenchRow>,
    pub manifest: RunManifest,
}

pub fn run(args: &BenchArgs) -> anyhow::Result<BenchOutcome> {
    if args.k == 0 {
        return Err(UsageError("--k must be at least 1".into()).into());
    }
    if !(args.timeout > 0.0) || !(args.avg_degree >= 0.0) {
        return Err(UsageError("--timeout must be positive and --avg-degree non-negative".into()).into());
    }
    args.approx.config().validate()?;
    let mut sizes = args.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.first() == Some(&0) {
        return Err(UsageError("sizes must be positive".into()).into());
    }

    let config = json!({
        "sizes": sizes,
        "measures": args.measures.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "avg_degree": args.avg_degree,
        "k": args.k,
        "queries": args.queries,
        "timeout_seconds": args.timeout,
        "epsilon": args.approx.epsilon,
        "jl_constant": args.approx.jl_constant,
        "generator": "gnm",
    });
    let mut manifest = RunManifest::new("bench", config, Some(args.approx.seed));
    let mut rows = Vec::new();
    for &n in &sizes {
        let g = manifest.time(&format!("generate n={n}"), || bench_graph(n, args.avg_degree, args.approx.seed));
        for &measure in &args.measures {
            let row = run_cell(&g, measure, args);
            log::info!("{} n={} status={} total={:?}", row.measure, n, row.status, row.total_seconds());
            rows.push(row);
        }
    }

    let csv = to_csv(&rows);
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).map_err(ForestSimError::from)?;
            manifest.artifact(path);
        }
        None => print!("{csv}"),
    }
    manifest.extra = json!({ "rows": rows });
    let manifest_path = args
        .manifest
        .clone()
        .or_else(|| args.out.as_ref().map(|p| manifest_path_for(p)));
    if let Some(path) = manifest_path {
        let n_max = sizes.last().copied().unwrap_or(0);
        manifest.write(&path, (n_max * 8 * 64) as u64)?;
    }
    Ok(BenchOutcome { rows, manifest })
}

fn run_cell(g: &Graph, measure: Measure, args: &BenchArgs) -> BenchRow {
    let mut row = BenchRow {
        measure: measure.name(),
        n: g.n(),
        m: g.m(),
        precompute_seconds: None,
        query_seconds: None,
        max_query_evaluations: None,
        status: "ok",
    };
    let budget = Budget::with_timeout(Duration::from_secs_f64(args.timeout));
    match time_cell(g, measure, args, &budget) {
        Ok((pre, query, evals)) => {
            row.precompute_seconds = Some(pre);
            row.query_seconds = Some(query);
            row.max_query_evaluations = Some(evals);
        }
        Err(ForestSimError::Interrupted) => row.status = "timeout",
        Err(ForestSimError::SizeLimit { .. }) => row.status = "size-limit",
        Err(e) => {
            log::warn!("{} n={}: {e}", measure.name(), g.n());
            row.status = "error";
        }
    }
    row
}

/// Returns (precompute seconds, query seconds, max evaluations per query).
fn time_cell(g: &Graph, measure: Measure, args: &BenchArgs, budget: &Budget) -> forestsim::Result<(f64, f64, usize)> {
    let n = g.n();
    if n < 2 {
        return Err(ForestSimError::Invalid("a query needs at least two nodes".into()));
    }
    let k = args.k.min(n - 1);
    let queries = args.queries.unwrap_or(n).min(n);
    let start = Instant::now();
    // each arm returns the query closure, which reports evaluations per query
    let query: Box<dyn Fn(usize) -> forestsim::Result<usize>> = match measure {
        Measure::ForestsimEx | Measure::ForestsimAp => {
            let (diag, tag) = if measure == Measure::ForestsimEx {
                let cfg = ExactConfig {
                    dense_limit: args.dense_limit,
                };
                (forest_diag_with(g, cfg, budget)?, MethodTag::Exact)
            } else {
                let cfg = args.approx.config();
                let tag = MethodTag::Approx {
                    epsilon: cfg.epsilon,
                    seed: cfg.seed,
                };
                (approx_forest_diag_with(g, &cfg, budget)?, tag)
            };
            let index = build_index(g, diag, tag)?;
            Box::new(move |u| index.top_k_search_counted(u, k).map(|(_, c)| c))
        }
        Measure::Rolesim => {
            let cfg = RoleSimConfig {
                max_iterations: args.rolesim_iterations,
                ..RoleSimConfig::default()
            };
            let scores = rolesim_compute_with(g, &cfg, budget)?;
            // a row sort scores every other node
            Box::new(move |u| rolesim_topk(&scores, u, k).map(|_| n - 1))
        }
        Measure::Structsim => {
            let idx = structsim_build_index_with(g, DEFAULT_LEVELS, budget)?;
            Box::new(move |u| structsim_topk_counted(&idx, u, k).map(|(_, c)| c))
        }
    };
    let precompute = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let mut max_evals = 0;
    for u in 0..queries {
        if u % 64 == 0 {
            budget.check()?;
        }
        max_evals = max_evals.max(query(u)?);
    }
    Ok((precompute, start.elapsed().as_secs_f64(), max_evals))
}
