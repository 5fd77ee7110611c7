//! `websurf`: generate Webgraph models, measure them, evaluate the theory and
//! run the experiments.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage error, 3 I/O error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "websurf", version, about = "Random-surfer Webgraph models and their height and diameter")]
struct Cli {
    /// Worker threads for parallel trials (default: available parallelism).
    #[arg(long, global = true, env = "WEBSURF_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow a graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Height, diameter and semi-diameter of an edge-list graph, as JSON.
    Metrics(MetricsArgs),
    /// PageRank or the attachment-walk law of an edge-list graph, as CSV.
    Pagerank(PagerankArgs),
    /// Simulate the continuous-time branching tree, summary as JSON.
    Branch(BranchArgs),
    /// Evaluate closed-form functions and constants.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Run a seeded experiment, summary as JSON.
    Experiment(ExperimentArgs),
    /// Run the acceptance suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Model {
    Surfer,
    Pagerank,
    Generalized,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Law {
    Const0,
    BernoulliHalf,
    Geo,
    Custom,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "surfer")]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Step law of the generalized tree model.
    #[arg(long, value_enum, default_value = "geo")]
    law: Law,
    /// Probabilities of 0, 1, 2, ... steps for `--law custom`.
    #[arg(long, value_delimiter = ',')]
    law_probs: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Also compute the diameter by BFS from every vertex as a cross-check.
    #[arg(long)]
    all_pairs: bool,
}

#[derive(Args, Debug)]
struct PagerankArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Emit the endpoint law of an L(p, beta) walk instead of PageRank.
    #[arg(long)]
    walk_beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BranchKind {
    T,
    Tprime,
}

#[derive(Args, Debug)]
struct BranchArgs {
    /// Time horizon.
    #[arg(long)]
    t: Option<f64>,
    /// Stop after this many splits instead of at a time horizon.
    #[arg(long, conflicts_with = "t")]
    splits: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, value_enum, default_value = "t")]
    variant: BranchKind,
    #[arg(long, default_value_t = websurf_core::trees::DEFAULT_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum TheoryCommand {
    /// Print one function value.
    Eval(EvalArgs),
    /// Tabulate constants over a p grid as CSV.
    Table(TableArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TheoryFn {
    P0,
    S,
    #[value(name = "cL")]
    CL,
    #[value(name = "cU")]
    CU,
    #[value(name = "cU-variational")]
    CUVariational,
    Profile,
    Upsilon,
    F,
    H,
    Phi,
    PhiInverse,
    #[value(name = "gL")]
    GL,
    #[value(name = "gU")]
    GU,
    #[value(name = "gU-prime")]
    GUPrime,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    function: TheoryFn,
    #[arg(long)]
    p: Option<f64>,
    /// Argument of the function (`a`, `s` or `x`).
    #[arg(long, visible_aliases = ["x", "s"])]
    a: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    grid: usize,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Comma-separated columns, from cL and cU.
    #[arg(long = "fn", value_delimiter = ',', default_value = "cL,cU")]
    functions: Vec<String>,
    /// `lo:hi:step`.
    #[arg(long)]
    p_grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExperimentKind {
    Height,
    Diameter,
    Webgraph,
    Equivalence,
    LargeDeviation,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    kind: ExperimentKind,
    /// JSON experiment spec; flags below are ignored when given.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long, value_enum, default_value = "surfer")]
    model: Model,
    #[arg(long, value_enum, default_value = "geo")]
    law: Law,
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    beta: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.25)]
    band: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// CSV output; the JSON summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run only these criteria (comma-separated ids).
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("websurf: cannot set up {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("websurf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
