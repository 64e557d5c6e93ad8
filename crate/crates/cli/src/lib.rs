//! Command-line driver: precompute an index, query it, evaluate measures
//! against labels, and run timing sweeps.

pub mod bench;
pub mod evaluate;
pub mod manifest;
pub mod precompute;
pub mod query;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use forestsim::{load_edge_list, ForestSimError, Graph, NodeIdMap};

pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const SIZE_LIMIT: i32 = 4;
    pub const CONVERGENCE: i32 = 5;
    pub const FINGERPRINT: i32 = 6;
    pub const IO: i32 = 7;
}

#[derive(Debug, Parser)]
#[command(name = "forestsim", version, about = "Role similarity search with spanning rooted forests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the forest-matrix diagonal and write a search index.
    Precompute(precompute::PrecomputeArgs),
    /// Top-k most similar nodes for one node.
    Topk(query::TopkArgs),
    /// Top-k lists for every node, one line per node.
    TopkAll(query::TopkAllArgs),
    /// Average Precision@K of several measures on a labelled graph.
    Eval(evaluate::EvalArgs),
    /// Precompute and query timings on synthetic graphs, as CSV.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Measure {
    ForestsimEx,
    ForestsimAp,
    Rolesim,
    Structsim,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::ForestsimEx => "forestsim-ex",
            Measure::ForestsimAp => "forestsim-ap",
            Measure::Rolesim => "rolesim",
            Measure::Structsim => "structsim",
        }
    }
}

/// Knobs of the approximate diagonal shared by several commands.
#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    /// Relative error target.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// C in k = ceil(C ln n / epsilon^2) sketch rows.
    #[arg(long, default_value_t = 4.0)]
    pub jl_constant: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub solver_tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iterations: usize,
}

impl ApproxArgs {
    pub fn config(&self) -> forestsim::ApproxConfig {
        forestsim::ApproxConfig {
            epsilon: self.epsilon,
            jl_constant: self.jl_constant,
            solver_rel_tol: self.solver_tol,
            max_iterations: self.max_iterations,
            seed: self.seed,
        }
    }
}

impl Default for ApproxArgs {
    fn default() -> Self {
        let d = forestsim::ApproxConfig::default();
        Self {
            epsilon: d.epsilon,
            seed: d.seed,
            jl_constant: d.jl_constant,
            solver_tol: d.solver_rel_tol,
            max_iterations: d.max_iterations,
        }
    }
}

/// Bad command-line values that clap cannot catch.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Precompute(a) => precompute::run(&a).map(|_| ()),
        Command::Topk(a) => query::run_topk(&a),
        Command::TopkAll(a) => query::run_topk_all(&a).map(|_| ()),
        Command::Eval(a) => evaluate::run(&a).map(|_| ()),
        Command::Bench(a) => bench::run(&a).map(|_| ()),
    }
}

/// Maps an error chain onto the documented exit codes.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return exit::USAGE;
    }
    if let Some(e) = err.downcast_ref::<ForestSimError>() {
        return match e {
            ForestSimError::Parse { .. }
            | ForestSimError::EmptyGraph
            | ForestSimError::Labels(_)
            | ForestSimError::Format(_) => exit::PARSE,
            ForestSimError::SizeLimit { .. } => exit::SIZE_LIMIT,
            ForestSimError::NoConvergence { .. } => exit::CONVERGENCE,
            ForestSimError::Fingerprint { .. } => exit::FINGERPRINT,
            ForestSimError::Io(_) => exit::IO,
            ForestSimError::BadK { .. } | ForestSimError::UnknownNode(_) | ForestSimError::Config(_) => exit::USAGE,
            _ => exit::OTHER,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return exit::IO;
    }
    exit::OTHER
}

pub fn load_graph(path: &Path) -> anyhow::Result<(Graph, NodeIdMap)> {
    let file = File::open(path)
        .map_err(ForestSimError::from)
        .with_context(|| format!("opening {}", path.display()))?;
    let loaded = load_edge_list(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    log::info!("loaded {}: {} nodes, {} edges", path.display(), loaded.0.n(), loaded.0.m());
    Ok(loaded)
}

/// `<index>.ids`: the external node ids, one per line in internal order.
pub fn ids_path(index: &Path) -> PathBuf {
    let mut s = index.as_os_str().to_owned();
    s.push(".ids");
    PathBuf::from(s)
}

/// Default manifest location next to an output file.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
