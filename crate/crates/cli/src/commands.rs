use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;
use websurf_core::acceptance::{run_criterion, CRITERIA};
use websurf_core::experiments::{
    run_diameter_experiment, run_equivalence_experiment, run_height_experiment,
    run_large_deviation_experiment, run_webgraph_bound_experiment, ExperimentSpec,
};
use websurf_core::graph::{read_edge_list, write_edge_list, GraphHeader};
use websurf_core::metrics::{diameter_all_pairs, MetricReport};
use websurf_core::pagerank::{pagerank, walk_attachment_distribution};
use websurf_core::theory::{self, Rates};
use websurf_core::trees::{simulate_branching, stopped_branching_tree, BranchVariant};
use websurf_core::{graph, Error, ModelConfig, SeedSpec, StepLaw, Tolerances, Variant};

use crate::{
    BranchArgs, BranchKind, Command, EvalArgs, ExperimentArgs, ExperimentKind, GenerateArgs, Law,
    MetricsArgs, Model, PagerankArgs, TableArgs, TheoryCommand, TheoryFn, VerifyArgs,
};

pub enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Core(e) => match e {
                Error::Io { .. } | Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => 3,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Buffered writer on `path`, or stdout.
fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut w: Box<dyn Write>, what: &str) -> Result<()> {
    w.flush().map_err(|e| CliError::Io(format!("{what}: {e}")))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    println!("{text}");
    Ok(())
}

pub fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Metrics(a) => metrics(a),
        Command::Pagerank(a) => pagerank_cmd(a),
        Command::Branch(a) => branch(a),
        Command::Theory(TheoryCommand::Eval(a)) => eval(a),
        Command::Theory(TheoryCommand::Table(a)) => table(a),
        Command::Experiment(a) => experiment(a),
        Command::Verify(a) => verify(a),
    }
}

fn variant(model: Model, law: Law, p: f64, probs: &[f64]) -> Result<Variant> {
    Ok(match model {
        Model::Surfer => Variant::RandomSurfer,
        Model::Pagerank => Variant::PageRankSelection,
        Model::Generalized => Variant::Generalized(match law {
            Law::Const0 => StepLaw::Constant0,
            Law::BernoulliHalf => StepLaw::BernoulliHalf,
            Law::Geo => StepLaw::Geometric(p),
            Law::Custom => {
                if probs.is_empty() {
                    return Err(CliError::Usage("--law custom needs --law-probs".into()));
                }
                StepLaw::Custom(probs.to_vec())
            }
        }),
    })
}

fn generate(a: GenerateArgs) -> Result<u8> {
    let config = ModelConfig {
        n: a.n,
        d: a.d,
        p: a.p,
        beta: a.beta,
        seed: SeedSpec::new(a.seed, 0),
        variant: variant(a.model, a.law, a.p, &a.law_probs)?,
    };
    let g = graph::generate(&config)?;
    let mut w = output(a.out.as_ref())?;
    write_edge_list(&mut w, &GraphHeader::from_config(&config), &g)
        .map_err(|e| CliError::Io(format!("writing edge list: {e}")))?;
    finish(w, "writing edge list")?;
    Ok(0)
}

fn load(path: &Path) -> Result<websurf_core::MultiDigraph> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let (_, g) = read_edge_list(BufReader::new(file)).map_err(|e| match e {
        Error::Parse { line, reason } => CliError::Io(format!("{}:{line}: {reason}", path.display())),
        other => other.into(),
    })?;
    Ok(g)
}

fn metrics(a: MetricsArgs) -> Result<u8> {
    let g = load(&a.input)?;
    let report = MetricReport::for_graph(&g);
    if a.all_pairs {
        let check = diameter_all_pairs(&g)?;
        if check != report.diameter {
            eprintln!("websurf: all-pairs diameter {check} differs from {}", report.diameter);
            return Ok(1);
        }
    }
    println!("{}", serde_json::to_string(&report).map_err(Error::from)?);
    Ok(0)
}

fn pagerank_cmd(a: PagerankArgs) -> Result<u8> {
    let g = load(&a.input)?;
    let dist = match a.walk_beta {
        Some(beta) => walk_attachment_distribution(&g, a.p, beta, a.tol)?,
        None => pagerank(&g, a.p, a.tol)?,
    };
    let mut w = output(a.out.as_ref())?;
    let mut text = String::from("vertex,prob\n");
    for (v, x) in dist.probs().iter().enumerate() {
        text.push_str(&format!("{v},{x}\n"));
    }
    w.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("writing distribution: {e}")))?;
    finish(w, "writing distribution")?;
    Ok(0)
}

fn branch(a: BranchArgs) -> Result<u8> {
    let seed = SeedSpec::new(a.seed, 0);
    let (tree, truncated, horizon) = match (a.t, a.splits) {
        (Some(t), None) => {
            let kind = match a.variant {
                BranchKind::T => BranchVariant::T,
                BranchKind::Tprime => BranchVariant::Tprime,
            };
            let run = simulate_branching(t, a.p, kind, a.cap, seed)?;
            (run.tree, run.truncated, Some(t))
        }
        (None, Some(k)) => {
            if a.variant != BranchKind::T {
                return Err(CliError::Usage("--splits only supports --variant t".into()));
            }
            (stopped_branching_tree(k + 1, a.p, seed)?, false, None)
        }
        _ => return Err(CliError::Usage("give exactly one of --t or --splits".into())),
    };
    let nodes = tree.len();
    print_json(&json!({
        "t": horizon,
        "p": a.p,
        "nodes": nodes,
        "internal": tree.internal_count(),
        "leaves": tree.leaf_count(),
        "weighted_height": tree.weighted_height(),
        "log_nodes_over_t": horizon.filter(|&t| t > 0.0).map(|t| (nodes as f64).ln() / t),
        "truncated": truncated,
    }))?;
    Ok(0)
}

fn need(x: Option<f64>, flag: &str) -> Result<f64> {
    x.ok_or_else(|| CliError::Usage(format!("this function needs --{flag}")))
}

fn eval(a: EvalArgs) -> Result<u8> {
    let value = match a.function {
        TheoryFn::P0 => theory::solve_p0(),
        TheoryFn::S => theory::solve_s(need(a.p, "p")?)?,
        TheoryFn::CL => theory::c_l(need(a.p, "p")?)?,
        TheoryFn::CU => theory::c_u(need(a.p, "p")?)?,
        TheoryFn::CUVariational => {
            print_json(&theory::c_u_variational(need(a.p, "p")?, a.grid)?)?;
            return Ok(0);
        }
        TheoryFn::Profile => {
            print_json(&theory::TheoryProfile::new(need(a.p, "p")?)?)?;
            return Ok(0);
        }
        TheoryFn::Upsilon => theory::upsilon(need(a.a, "x")?)?,
        TheoryFn::F => theory::f(need(a.a, "x")?, need(a.p, "p")?)?,
        TheoryFn::H => theory::h(need(a.a, "x")?, need(a.p, "p")?)?,
        TheoryFn::Phi => theory::phi_fn(need(a.a, "a")?, need(a.p, "p")?)?,
        TheoryFn::PhiInverse => theory::phi_inverse(need(a.a, "s")?, need(a.p, "p")?)?,
        TheoryFn::GL => theory::g_l(need(a.a, "a")?, need(a.p, "p")?)?,
        TheoryFn::GU => theory::g_u(need(a.a, "a")?, need(a.p, "p")?)?,
        TheoryFn::GUPrime => theory::g_u_prime(need(a.a, "a")?, need(a.p, "p")?)?,
    };
    println!("{value}");
    Ok(0)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Usage(format!("--p-grid `{spec}` is not lo:hi:step"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if step.is_nan() || step <= 0.0 || hi < lo {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    // Round away the accumulated binary error so 0.1:0.9:0.2 prints 0.3.
    Ok((0..=count)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn table(a: TableArgs) -> Result<u8> {
    let grid = parse_grid(&a.p_grid)?;
    for f in &a.functions {
        if f != "cL" && f != "cU" {
            return Err(CliError::Usage(format!("unknown table column `{f}`; use cL and cU")));
        }
    }
    let mut text = format!("p,{}\n", a.functions.join(","));
    for p in grid {
        Rates::new(p)?;
        let mut row = vec![format!("{p}")];
        for f in &a.functions {
            let v = if f == "cL" { theory::c_l(p)? } else { theory::c_u(p)? };
            row.push(format!("{v}"));
        }
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let mut w = output(a.out.as_ref())?;
    w.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("writing table: {e}")))?;
    finish(w, "writing table")?;
    Ok(0)
}

fn experiment(a: ExperimentArgs) -> Result<u8> {
    let spec = match &a.spec {
        Some(path) => {
            let file = File::open(path).map_err(|e| io_err(path, e))?;
            let mut spec: ExperimentSpec =
                serde_json::from_reader(BufReader::new(file)).map_err(Error::from)?;
            if a.out.is_some() {
                spec.out = a.out.clone();
            }
            spec
        }
        None => {
            let name = a.name.clone().unwrap_or_else(|| format!("{:?}", a.kind).to_lowercase());
            let p0 = a.p.first().copied().unwrap_or(0.5);
            let mut spec = ExperimentSpec::new(&name, variant(a.model, a.law, p0, &[])?, SeedSpec::new(a.seed, 0));
            spec.n = a.n;
            spec.d = a.d;
            spec.p = a.p;
            spec.beta = a.beta;
            spec.trials = a.trials;
            spec.band = a.band;
            spec.samples = a.samples;
            spec.out = a.out;
            spec
        }
    };
    let summary = match a.kind {
        ExperimentKind::Height => run_height_experiment(&spec)?,
        ExperimentKind::Diameter => run_diameter_experiment(&spec)?,
        ExperimentKind::Webgraph => run_webgraph_bound_experiment(&spec)?,
        ExperimentKind::Equivalence => run_equivalence_experiment(&spec)?,
        ExperimentKind::LargeDeviation => run_large_deviation_experiment(&spec)?,
    };
    print_json(&summary)?;
    for c in summary.checks.iter().filter(|c| !c.passed) {
        eprintln!("{} check `{}` failed: {}", if c.soft { "soft" } else { "hard" }, c.name, c.detail);
    }
    Ok(if summary.passed() { 0 } else { 1 })
}

fn verify(a: VerifyArgs) -> Result<u8> {
    for id in &a.only {
        if !CRITERIA.iter().any(|c| c.0 == *id) {
            return Err(CliError::Usage(format!("no criterion {id}; ids run 1 to {}", CRITERIA.len())));
        }
    }
    let tol = Tolerances::default();
    let mut failed = 0;
    let mut ran = 0;
    for &(id, ..) in CRITERIA.iter().filter(|c| a.only.is_empty() || a.only.contains(&c.0)) {
        let outcome = run_criterion(id, &tol).expect("known id");
        println!("{}", outcome.line());
        ran += 1;
        if !outcome.passed() {
            failed += 1;
        }
    }
    eprintln!("{} of {ran} criteria passed", ran - failed);
    Ok(if failed == 0 { 0 } else { 1 })
}
