use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use forestsim::exact::{forest_diag_with, ExactConfig, DEFAULT_DENSE_LIMIT};
use forestsim::search::{build_index, MethodTag};
use forestsim::{approx_forest_diag, Budget, ForestIndex, ForestSimError};
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{ids_path, load_graph, manifest_path_for, ApproxArgs, Method};

#[derive(Debug, Clone, Args)]
pub struct PrecomputeArgs {
    /// Edge list: one `u v` pair per line.
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Approx)]
    pub method: Method,
    #[command(flatten)]
    pub approx: ApproxArgs,
    /// Largest graph the exact method accepts.
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
    /// Index file to write; node ids go to `<out>.ids`.
    #[arg(long)]
    pub out: PathBuf,
    /// Manifest path, `<out>.manifest.json` by default.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

pub struct Precomputed {
    pub index: ForestIndex,
    pub manifest: RunManifest,
}

pub fn run(args: &PrecomputeArgs) -> anyhow::Result<Precomputed> {
    let cfg = args.approx.config();
    let (config, seed) = match args.method {
        Method::Exact => (json!({ "method": "exact", "dense_limit": args.dense_limit }), None),
        Method::Approx => (
            json!({
                "method": "approx",
                "epsilon": cfg.epsilon,
                "jl_constant": cfg.jl_constant,
                "solver_rel_tol": cfg.solver_rel_tol,
                "max_iterations": cfg.max_iterations,
            }),
            Some(cfg.seed),
        ),
    };
    let mut manifest = RunManifest::new("precompute", config, seed);
    let (graph, ids) = manifest.time("load", || load_graph(&args.graph))?;
    let n = graph.n();

    let diag = manifest.time("diagonal", || match args.method {
        Method::Exact => forest_diag_with(
            &graph,
            ExactConfig {
                dense_limit: args.dense_limit,
            },
            &Budget::unlimited(),
        ),
        Method::Approx => approx_forest_diag(&graph, &cfg),
    })?;
    let method = match args.method {
        Method::Exact => MethodTag::Exact,
        Method::Approx => MethodTag::Approx {
            epsilon: cfg.epsilon,
            seed: cfg.seed,
        },
    };
    let index = manifest.time("sort", || build_index(&graph, diag, method))?;

    let write = |index: &ForestIndex| -> anyhow::Result<()> {
        let out = File::create(&args.out).map_err(ForestSimError::from)?;
        let mut out = BufWriter::new(out);
        index.write_to(&mut out)?;
        std::io::Write::flush(&mut out).map_err(ForestSimError::from)?;
        ids.write(BufWriter::new(File::create(ids_path(&args.out)).map_err(ForestSimError::from)?))?;
        Ok(())
    };
    manifest
        .time("write", || write(&index))
        .with_context(|| format!("writing {}", args.out.display()))?;
    manifest.artifact(&args.out);
    manifest.artifact(&ids_path(&args.out));
    manifest.extra = json!({
        "nodes": n,
        "edges": graph.m(),
        "sketch_rows": (args.method == Method::Approx).then(|| cfg.sketch_rows(n)),
        "unit_basis": (args.method == Method::Approx).then(|| cfg.uses_unit_basis(n)),
        "fingerprint": index.fingerprint_hex(),
    });
    let manifest_path = args.manifest.clone().unwrap_or_else(|| manifest_path_for(&args.out));
    let estimate = match args.method {
        Method::Exact => 8 * n * n,
        Method::Approx => graph.m() * 16 + n * 8 * (8 * forestsim::approx::LANES + 4),
    } as u64;
    manifest.write(&manifest_path, estimate)?;
    Ok(Precomputed { index, manifest })
}
