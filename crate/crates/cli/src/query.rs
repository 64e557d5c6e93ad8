use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use forestsim::{ForestIndex, ForestSimError, NodeIdMap, TopKResult};
use rayon::prelude::*;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{ids_path, load_graph, manifest_path_for, UsageError};

#[derive(Debug, Clone, Args)]
pub struct TopkArgs {
    pub index: PathBuf,
    /// Query node, as written in the edge list.
    #[arg(long)]
    pub node: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Emit JSON instead of a text table.
    #[arg(long)]
    pub json: bool,
    /// Refuse to answer if the index was not built from this edge list.
    #[arg(long)]
    pub verify_graph: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TopkAllArgs {
    pub index: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Output file: `node<TAB>hit:score hit:score ...` per line.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub verify_graph: Option<PathBuf>,
}

/// Reads an index and its id sidecar.
pub fn load_index(path: &Path) -> anyhow::Result<(ForestIndex, NodeIdMap)> {
    let open = |p: &Path| {
        File::open(p)
            .map(BufReader::new)
            .map_err(ForestSimError::from)
            .with_context(|| format!("opening {}", p.display()))
    };
    let index = ForestIndex::read_from(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    let ids_file = ids_path(path);
    let ids = NodeIdMap::read(open(&ids_file)?).with_context(|| format!("reading {}", ids_file.display()))?;
    if ids.len() != index.n() {
        return Err(ForestSimError::Format(format!(
            "{} lists {} ids for an index of {} nodes",
            ids_file.display(),
            ids.len(),
            index.n()
        ))
        .into());
    }
    Ok((index, ids))
}

fn verify(index: &ForestIndex, graph: Option<&Path>) -> anyhow::Result<()> {
    if let Some(path) = graph {
        let (g, _) = load_graph(path)?;
        index.verify_graph(&g).with_context(|| format!("checking {}", path.display()))?;
    }
    Ok(())
}

fn clamp_k(k: usize, n: usize) -> usize {
    if k > n.saturating_sub(1) {
        log::warn!("k = {k} exceeds n - 1 = {}; clamping", n.saturating_sub(1));
        return n.saturating_sub(1);
    }
    k
}

pub fn topk(args: &TopkArgs) -> anyhow::Result<(TopKResult, NodeIdMap)> {
    if args.k == 0 {
        return Err(UsageError("--k must be at least 1".into()).into());
    }
    let (index, ids) = load_index(&args.index)?;
    verify(&index, args.verify_graph.as_deref())?;
    let u = ids.resolve(&args.node)?;
    Ok((index.top_k_search(u, clamp_k(args.k, index.n()))?, ids))
}

pub fn run_topk(args: &TopkArgs) -> anyhow::Result<()> {
    let (result, ids) = topk(args)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if args.json {
        let hits: Vec<_> = result
            .hits
            .iter()
            .map(|h| json!({ "node": ids.external(h.node), "score": h.score }))
            .collect();
        let doc = json!({
            "schema_version": crate::manifest::SCHEMA_VERSION,
            "query": ids.external(result.query),
            "k": args.k,
            "results": hits,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        let width = result.hits.iter().map(|h| ids.external(h.node).len()).max().unwrap_or(4).max(4);
        writeln!(out, "rank  {:<width$}  score", "node")?;
        for (rank, h) in result.hits.iter().enumerate() {
            writeln!(out, "{:>4}  {:<width$}  {:.6}", rank + 1, ids.external(h.node), h.score)?;
        }
    }
    Ok(())
}

pub struct TopkAllOutcome {
    pub manifest: RunManifest,
    /// Most similarity evaluations any single query needed.
    pub max_evaluations: usize,
}

pub fn run_topk_all(args: &TopkAllArgs) -> anyhow::Result<TopkAllOutcome> {
    if args.k == 0 {
        return Err(UsageError("--k must be at least 1".into()).into());
    }
    let mut manifest = RunManifest::new("topk-all", json!({ "k": args.k }), None);
    let (index, ids) = manifest.time("load", || load_index(&args.index))?;
    verify(&index, args.verify_graph.as_deref())?;
    let n = index.n();
    let k = clamp_k(args.k, n);
    let answers = manifest.time("query", || {
        (0..n)
            .into_par_iter()
            .map(|u| index.top_k_search_counted(u, k))
            .collect::<forestsim::Result<Vec<_>>>()
    })?;
    let max_evaluations = answers.iter().map(|(_, c)| *c).max().unwrap_or(0);

    manifest.time("write", || -> anyhow::Result<()> {
        let file = File::create(&args.out).map_err(ForestSimError::from)?;
        let mut out = BufWriter::new(file);
        for (result, _) in &answers {
            write!(out, "{}\t", ids.external(result.query))?;
            for (i, h) in result.hits.iter().enumerate() {
                let sep = if i == 0 { "" } else { " " };
                write!(out, "{sep}{}:{}", ids.external(h.node), h.score)?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    })
    .with_context(|| format!("writing {}", args.out.display()))?;
    manifest.artifact(&args.out);
    manifest.extra = json!({
        "nodes": n,
        "k": k,
        "max_evaluations_per_query": max_evaluations,
    });
    let path = args.manifest.clone().unwrap_or_else(|| manifest_path_for(&args.out));
    manifest.write(&path, (n * (24 + 16 * k)) as u64)?;
    Ok(TopkAllOutcome {
        manifest,
        max_evaluations,
    })
}
