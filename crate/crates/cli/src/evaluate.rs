use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use forestsim::baselines::structsim::DEFAULT_LEVELS;
use forestsim::baselines::{rolesim_compute, rolesim_topk, structsim_build_index, structsim_topk, RoleSimConfig};
use forestsim::eval::{ap_curve, load_labels, APReport, LabeledGraph};
use forestsim::exact::{forest_diag_with, ExactConfig, DEFAULT_DENSE_LIMIT};
use forestsim::search::{build_index, MethodTag};
use forestsim::{approx_forest_diag, Budget, ForestSimError};
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{load_graph, ApproxArgs, Measure, UsageError};

pub const FOREST_TIE_RULE: &str =
    "walk from the query's sorted position; equal similarity takes the larger-w side first; sort ties by node id";
pub const BASELINE_TIE_RULE: &str = "score descending, node id ascending";

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    pub graph: PathBuf,
    /// `node_id label` per line, covering every node.
    pub labels: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Measure::ForestsimEx, Measure::ForestsimAp])]
    pub measures: Vec<Measure>,
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    #[command(flatten)]
    pub approx: ApproxArgs,
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
    /// Node limit for RoleSim's dense score matrix.
    #[arg(long, default_value_t = forestsim::baselines::rolesim::DEFAULT_ROLESIM_LIMIT)]
    pub rolesim_limit: usize,
    #[arg(long, default_value_t = 20)]
    pub rolesim_iterations: usize,
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    pub structsim_levels: usize,
    /// Directory for `<measure>.json`, `comparison.csv`, `comparison.txt`
    /// and `manifest.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub struct EvalOutcome {
    pub reports: Vec<APReport>,
    /// Measures skipped because the graph exceeds their size limit.
    pub refused: Vec<(Measure, String)>,
    pub manifest: RunManifest,
}

pub fn run(args: &EvalArgs) -> anyhow::Result<EvalOutcome> {
    if args.kmax == 0 {
        return Err(UsageError("--kmax must be at least 1".into()).into());
    }
    let cfg = args.approx.config();
    let config = json!({
        "measures": args.measures.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "kmax": args.kmax,
        "epsilon": cfg.epsilon,
        "jl_constant": cfg.jl_constant,
        "dense_limit": args.dense_limit,
        "rolesim_limit": args.rolesim_limit,
        "rolesim_iterations": args.rolesim_iterations,
        "structsim_levels": args.structsim_levels,
    });
    let mut manifest = RunManifest::new("eval", config, Some(cfg.seed));
    let lg = manifest.time("load", || -> anyhow::Result<LabeledGraph> {
        let (g, ids) = load_graph(&args.graph)?;
        let file = File::open(&args.labels)
            .map_err(ForestSimError::from)
            .with_context(|| format!("opening {}", args.labels.display()))?;
        load_labels(BufReader::new(file), g, &ids).with_context(|| format!("reading {}", args.labels.display()))
    })?;
    let n = lg.n();
    if n < 2 {
        return Err(UsageError("evaluation needs at least two nodes".into()).into());
    }
    let kmax = if args.kmax > n - 1 {
        log::warn!("kmax = {} exceeds n - 1 = {}; clamping", args.kmax, n - 1);
        n - 1
    } else {
        args.kmax
    };
    fs::create_dir_all(&args.out_dir).map_err(ForestSimError::from)?;

    let mut reports = Vec::new();
    let mut refused = Vec::new();
    for &measure in &args.measures {
        let phase = measure.name();
        match manifest.time(phase, || evaluate_measure(&lg, measure, args, kmax)) {
            Ok(report) => {
                let path = args.out_dir.join(format!("{}.json", measure.name()));
                fs::write(&path, report.to_json() + "\n").map_err(ForestSimError::from)?;
                manifest.artifact(&path);
                reports.push(report);
            }
            Err(e @ ForestSimError::SizeLimit { .. }) => {
                log::warn!("{}: skipped, {e}", measure.name());
                refused.push((measure, e.to_string()));
            }
            Err(e) => return Err(e).with_context(|| format!("evaluating {}", measure.name())),
        }
    }

    let mut csv = String::from("measure,k,average_precision\n");
    for r in &reports {
        r.write_csv_rows(&mut csv);
    }
    let table = comparison_table(&reports, kmax);
    for (name, body) in [("comparison.csv", &csv), ("comparison.txt", &table)] {
        let path = args.out_dir.join(name);
        fs::write(&path, body).map_err(ForestSimError::from)?;
        manifest.artifact(&path);
    }
    print!("{table}");
    for (m, why) in &refused {
        println!("{}: refused ({why})", m.name());
    }
    manifest.extra = json!({
        "nodes": n,
        "edges": lg.graph().m(),
        "labels": lg.label_names(),
        "refused": refused.iter().map(|(m, why)| json!({ "measure": m.name(), "reason": why })).collect::<Vec<_>>(),
        "tie_rules": reports.iter().map(|r| json!({ "measure": r.measure, "tie_rule": r.tie_rule })).collect::<Vec<_>>(),
    });
    manifest.write(&args.out_dir.join("manifest.json"), (16 * n * n) as u64)?;
    Ok(EvalOutcome {
        reports,
        refused,
        manifest,
    })
}

fn evaluate_measure(lg: &LabeledGraph, measure: Measure, args: &EvalArgs, kmax: usize) -> forestsim::Result<APReport> {
    let g = lg.graph();
    let name = measure.name();
    match measure {
        Measure::ForestsimEx | Measure::ForestsimAp => {
            let (diag, method) = if measure == Measure::ForestsimEx {
                let cfg = ExactConfig {
                    dense_limit: args.dense_limit,
                };
                (forest_diag_with(g, cfg, &Budget::unlimited())?, MethodTag::Exact)
            } else {
                let cfg = args.approx.config();
                let tag = MethodTag::Approx {
                    epsilon: cfg.epsilon,
                    seed: cfg.seed,
                };
                (approx_forest_diag(g, &cfg)?, tag)
            };
            let index = build_index(g, diag, method)?;
            ap_curve(lg, name, FOREST_TIE_RULE, &|u, k| index.top_k_search(u, k), kmax)
        }
        Measure::Rolesim => {
            let cfg = RoleSimConfig {
                max_iterations: args.rolesim_iterations,
                dense_limit: args.rolesim_limit,
                ..RoleSimConfig::default()
            };
            let scores = rolesim_compute(g, &cfg)?;
            ap_curve(lg, name, BASELINE_TIE_RULE, &|u, k| rolesim_topk(&scores, u, k), kmax)
        }
        Measure::Structsim => {
            let idx = structsim_build_index(g, args.structsim_levels)?;
            ap_curve(lg, name, BASELINE_TIE_RULE, &|u, k| structsim_topk(&idx, u, k), kmax)
        }
    }
}

/// One row per K, one column per measure.
pub fn comparison_table(reports: &[APReport], kmax: usize) -> String {
    let mut out = String::from("   K");
    for r in reports {
        let _ = write!(out, "  {:>12}", r.measure);
    }
    out.push('\n');
    for k in 1..=kmax {
        let _ = write!(out, "{k:>4}");
        for r in reports {
            match r.entries.iter().find(|e| e.k == k) {
                Some(e) => {
                    let _ = write!(out, "  {:>12.4}", e.average_precision);
                }
                None => out.push_str("           ---"),
            }
        }
        out.push('\n');
    }
    out
}
