//! The acceptance suite: thirteen criteria, each with a runtime budget.
//!
//! Shared by the `acceptance` test target and the `verify` subcommand.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::experiments::{
    run_height_experiment, run_webgraph_bound_experiment, ExperimentSpec, ExperimentSummary,
};
use crate::graph::{generate, marked_spanning_tree, ModelConfig, Variant};
use crate::metrics::{diameter, height, semi_diameter, weighted_height, Undirected};
use crate::pagerank::{pagerank, walk_attachment_distribution, DEFAULT_TOL};
use crate::sampling::SeedSpec;
use crate::stats::median;
use crate::theory::{
    c_l, c_u, c_u_variational, chernoff_suite, midpoint_grid, right_grid, solve_p0,
    technical_inequality_check, y_sum_point_mass, ChernoffGrid,
};
use crate::tolerances::Tolerances;
use crate::trees::{
    contract_zero_edges, generate_second_model, generate_third_model, simulate_branching,
    stopped_tree_law_check, BranchVariant, LawCheck, DEFAULT_CAP,
};

/// Result of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    /// The check itself, before the runtime budget is applied.
    pub check_passed: bool,
    pub elapsed_secs: f64,
    pub budget_secs: f64,
    pub detail: String,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.check_passed && self.elapsed_secs <= self.budget_secs
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {:<32} {:>8.2}s / {:>4.0}s  {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_secs,
            self.budget_secs,
            self.detail
        )
    }
}

type Check = fn(&Tolerances) -> Result<(bool, String)>;

/// `(id, name, budget in seconds, check)`.
pub const CRITERIA: [(usize, &str, f64, Check); 13] = [
    (1, "constant p0", 1.0, p0_value),
    (2, "limit consistency", 1.0, limit_consistency),
    (3, "variational cross-check", 10.0, variational),
    (4, "exact pmf oracle", 10.0, pmf_oracle),
    (5, "chernoff inequality suite", 30.0, chernoff),
    (6, "technical inequality grid", 5.0, technical_grid),
    (7, "pagerank equivalence", 30.0, pagerank_equivalence),
    (8, "coupling exactness", 30.0, coupling),
    (9, "transformation chain laws", 180.0, transformation_chain),
    (10, "branching growth", 120.0, branching_growth),
    (11, "height band", 240.0, height_band),
    (12, "diameter bound", 240.0, diameter_bound),
    (13, "structural invariants", 60.0, structural_invariants),
];

/// Master seed of every randomized criterion.
pub const SEED: u64 = 20_240_601;

pub fn run_criterion(id: usize, tol: &Tolerances) -> Option<Outcome> {
    let &(id, name, budget, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (check_passed, detail) = match check(tol) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(Outcome {
        id,
        name,
        check_passed,
        elapsed_secs: start.elapsed().as_secs_f64(),
        budget_secs: budget,
        detail,
    })
}

/// Runs every criterion in order, calling `report` after each.
pub fn run_all(tol: &Tolerances, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter_map(|c| {
            let o = run_criterion(c.0, tol)?;
            report(&o);
            Some(o)
        })
        .collect()
}

fn seed(name: &str) -> SeedSpec {
    SeedSpec::new(SEED, 0).derive(name, 0)
}

fn p0_value(_: &Tolerances) -> Result<(bool, String)> {
    let p0 = solve_p0();
    Ok(((p0 - 0.206).abs() <= 1e-3, format!("p0 = {p0:.7}")))
}

fn limit_consistency(_: &Tolerances) -> Result<(bool, String)> {
    let near_one = c_l(0.999)?;
    let mut ok = (near_one - std::f64::consts::E).abs() <= 0.02;
    let mut worst: f64 = 0.0;
    for p in [0.25, 0.5, 0.9] {
        worst = worst.max((c_u(p)? - c_l(p)?).abs());
    }
    ok &= worst <= 1e-10;
    Ok((ok, format!("c_L(0.999) = {near_one:.5}; max |c_U - c_L| = {worst:.1e}")))
}

fn variational(tol: &Tolerances) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for p in [0.1, 0.3, 0.7] {
        let v = c_u_variational(p, tol.grid_points)?;
        worst = worst.max((v.ratio - c_u(p)?).abs());
    }
    Ok((worst <= tol.variational, format!("max gap {worst:.2e}")))
}

/// Law of `Y_1 + ... + Y_m` by repeated convolution; index `k` holds the
/// mass of the value `m - k`.
fn convolved_y_sum(m: u32, p: f64, cap: usize) -> Vec<f64> {
    let single: Vec<f64> = (0..=cap).map(|k| p * (1.0 - p).powi(k as i32)).collect();
    let mut law = vec![1.0];
    for _ in 0..m {
        let mut next = vec![0.0; law.len() + cap];
        for (i, &a) in law.iter().enumerate() {
            for (k, &b) in single.iter().enumerate() {
                next[i + k] += a * b;
            }
        }
        law = next;
    }
    law
}

fn pmf_oracle(tol: &Tolerances) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for p in [0.3, 0.5, 0.8] {
        for m in 1..=10u32 {
            // Values down to -20 need up to m + 20 failures in total.
            let law = convolved_y_sum(m, p, 40);
            for target in -20..=m as i64 {
                let want = law[(m as i64 - target) as usize];
                worst = worst.max((y_sum_point_mass(m, target, p)? - want).abs());
                points += 1;
            }
        }
    }
    Ok((worst <= tol.pmf, format!("{points} points, max error {worst:.1e}")))
}

fn chernoff(_: &Tolerances) -> Result<(bool, String)> {
    let r = chernoff_suite(&ChernoffGrid::default())?;
    let checks: usize = r.families.iter().map(|f| f.checks).sum();
    Ok((
        r.violations() == 0,
        format!("{} violations in {checks} checks", r.violations()),
    ))
}

fn technical_grid(_: &Tolerances) -> Result<(bool, String)> {
    let r = technical_inequality_check(&midpoint_grid(100), &right_grid(100))?;
    Ok((
        r.holds(),
        format!(
            "{} points, min margin {:.4} at p={:.3} c={:.3}",
            r.points, r.min_margin, r.argmin_p, r.argmin_c
        ),
    ))
}

fn pagerank_equivalence(tol: &Tolerances) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in [1, 50, 200] {
        for d in 1..=3 {
            for p in [0.2, 0.5, 0.9] {
                let g = generate(&ModelConfig::surfer(n, d, p, seed("pagerank")))?;
                let pi = pagerank(&g, p, tol.pagerank)?;
                let tau = walk_attachment_distribution(&g, p, 0.0, tol.pagerank)?;
                worst = worst.max(pi.l1(&tau));
            }
        }
    }
    Ok((worst <= 2.0 * DEFAULT_TOL, format!("max L1 {worst:.2e}")))
}

fn coupling(_: &Tolerances) -> Result<(bool, String)> {
    let mismatches: usize = [0.3, 0.7]
        .into_iter()
        .flat_map(|p| (0..20u64).map(move |i| (p, i)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(p, i)| -> Result<usize> {
            let s = SeedSpec::new(SEED, 0).derive("coupling", i);
            let g = generate(&ModelConfig::surfer(10_000, 1, p, s))?;
            let depths = marked_spanning_tree(&g).depths();
            let tree = generate_second_model(10_000, p, s)?;
            Ok(depths
                .iter()
                .zip(tree.vertex_weights())
                .filter(|(&d, &w)| d as i64 != w)
                .count())
        })
        .sum::<Result<usize>>()?;
    Ok((mismatches == 0, format!("{mismatches} mismatched vertices over 40 trials")))
}

fn transformation_chain(tol: &Tolerances) -> Result<(bool, String)> {
    let trials = 500;
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [0.3, 0.7] {
        for n in [500, 2000] {
            let base = SeedSpec::new(SEED, 0).derive("chain", (n as u64) << 8 | (p * 10.0) as u64);
            let heights: Vec<i64> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let g = generate(&ModelConfig::surfer(n, 1, p, base.derive("first", i)))?;
                    Ok(height(&g) as i64)
                })
                .collect::<Result<_>>()?;
            let third: Vec<i64> = (0..trials)
                .into_par_iter()
                .map(|i| Ok(weighted_height(&generate_third_model(n, p, base.derive("third", i))?)))
                .collect::<Result<_>>()?;
            let first_vs_third = LawCheck::compare(&heights, &third, tol.alpha);
            let stopped_vs_third = stopped_tree_law_check(n, p, trials as usize, base)?;
            ok &= first_vs_third.passed && stopped_vs_third.passed;
            parts.push(format!(
                "p={p} n={n}: {:.3}/{:.3}",
                first_vs_third.p_value, stopped_vs_third.p_value
            ));
        }
    }
    Ok((ok, format!("p-values {}", parts.join(", "))))
}

fn branching_growth(tol: &Tolerances) -> Result<(bool, String)> {
    let t = 10.0;
    let rates: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let run = simulate_branching(t, 0.5, BranchVariant::T, DEFAULT_CAP, seed("growth").derive("run", i))?;
            Ok((run.tree.len() as f64).ln() / t)
        })
        .collect::<Result<_>>()?;
    let med = median(&rates);
    let (lo, hi) = tol.growth_band;
    Ok((med >= lo && med <= hi, format!("median ln|V|/t = {med:.4}")))
}

fn summary_detail(s: &ExperimentSummary) -> String {
    s.checks
        .iter()
        .filter(|c| !c.soft)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect::<Vec<_>>()
        .join("; ")
}

fn height_band(tol: &Tolerances) -> Result<(bool, String)> {
    let mut spec = ExperimentSpec::new("height-band", Variant::RandomSurfer, SeedSpec::new(SEED, 0));
    spec.n = vec![1_000, 100_000];
    spec.p = vec![0.9];
    spec.trials = 100;
    spec.band = tol.height_band;
    spec.trend_fraction = tol.trend_fraction;
    let s = run_height_experiment(&spec)?;
    Ok((s.passed(), summary_detail(&s)))
}

fn diameter_bound(_: &Tolerances) -> Result<(bool, String)> {
    let mut spec = ExperimentSpec::new("diameter-bound", Variant::PageRankSelection, SeedSpec::new(SEED, 0));
    spec.n = vec![10_000];
    spec.d = vec![1, 2, 3];
    spec.p = vec![0.3, 0.7];
    spec.beta = vec![0.0, 0.5];
    spec.trials = 50;
    let s = run_webgraph_bound_experiment(&spec)?;
    Ok((s.passed(), summary_detail(&s)))
}

/// Seeded random fixtures covering every generator.
fn structural_invariants(_: &Tolerances) -> Result<(bool, String)> {
    let mut stream = seed("invariants").stream();
    let mut failures = Vec::new();
    let fixtures = 300;
    for i in 0..fixtures {
        let n = 1 + stream.below(400);
        let d = 1 + stream.below(4);
        let p = 0.05 + 0.95 * stream.open_unit();
        let beta = stream.open_unit();
        let s = seed("invariants").derive("fixture", i);
        let config = if i % 2 == 0 {
            ModelConfig::surfer(n, d, p, s)
        } else {
            ModelConfig::pagerank(n, d, p, beta, s)
        };
        let g = generate(&config)?;
        let degree_ok = (0..n).all(|v| g.out_slots(v).len() == d) && g.edge_count() == n * d;
        let order_ok = (1..n).all(|v| g.out_slots(v).iter().all(|&t| t < v));
        let (h, diam) = (height(&g), diameter(&g));
        let tree = marked_spanning_tree(&g);
        let chain_ok = diam <= 2 * h && semi_diameter(&tree) <= Undirected::from_tree(&tree).two_sweep() as i64;
        let q = p.min(0.95);
        let second = generate_second_model(n, q, s)?;
        let third = generate_third_model(n, q, s)?;
        let contract_ok = weighted_height(&contract_zero_edges(&second)) == weighted_height(&second)
            && weighted_height(&contract_zero_edges(&third)) == weighted_height(&third);
        for (ok, what) in [
            (degree_ok, "out-degree"),
            (order_ok, "birth order"),
            (chain_ok, "diameter chain"),
            (contract_ok, "contraction"),
        ] {
            if !ok {
                failures.push(format!("{what} (fixture {i}, n={n} d={d} p={p:.3})"));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{fixtures} fixtures, 4 properties each")
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}
