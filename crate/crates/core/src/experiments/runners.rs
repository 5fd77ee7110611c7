use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{generate, marked_spanning_tree, walk_endpoint, ModelConfig, StepLaw, Variant};
use crate::metrics::{diameter, height, semi_diameter, tree_height};
use crate::pagerank::{pagerank, walk_attachment_distribution, VertexDistribution, DEFAULT_TOL};
use crate::sampling::{Geometric, SeedSpec, WalkLength};
use crate::theory::{
    self, c_l, c_u, chernoff_suite, erlang_lower_tail, hat_x_sum_bound, hat_y_sum_tail,
    ChernoffGrid, Rates,
};

use super::{emit, summarize, Check, ExperimentRecord, ExperimentSpec, ExperimentSummary};

/// Interval the theory predicts for `height / ln n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightTarget {
    pub lower: f64,
    pub upper: f64,
}

impl HeightTarget {
    pub fn for_model(variant: &Variant, d: usize, p: f64) -> Result<Option<Self>> {
        let geometric = |p: f64| -> Result<Option<Self>> {
            if p >= 1.0 {
                return Ok(Some(HeightTarget::point(std::f64::consts::E)));
            }
            Ok(Some(HeightTarget {
                lower: c_l(p)?,
                upper: c_u(p)?,
            }))
        };
        match variant {
            Variant::RandomSurfer if d == 1 => geometric(p),
            Variant::Generalized(StepLaw::Geometric(q)) => geometric(*q),
            Variant::Generalized(StepLaw::Constant0) => Ok(Some(HeightTarget::point(std::f64::consts::E))),
            _ => Ok(None),
        }
    }

    fn point(x: f64) -> Self {
        HeightTarget { lower: x, upper: x }
    }

    fn scaled(self, k: f64) -> Self {
        HeightTarget {
            lower: self.lower * k,
            upper: self.upper * k,
        }
    }

    /// `[lower (1 - band), upper (1 + band)]`.
    fn contains(&self, x: f64, band: f64) -> bool {
        x >= self.lower * (1.0 - band) && x <= self.upper * (1.0 + band)
    }
}

struct Trial {
    record: ExperimentRecord,
    marked_tree_height: u32,
}

fn combos(spec: &ExperimentSpec) -> Vec<(usize, usize, f64, f64)> {
    let betas: &[f64] = if spec.variant == Variant::PageRankSelection {
        &spec.beta
    } else {
        &[0.0]
    };
    let mut out = Vec::new();
    for &n in &spec.n {
        for &d in &spec.d {
            for &p in &spec.p {
                for &beta in betas {
                    out.push((n, d, p, beta));
                }
            }
        }
    }
    out
}

fn run_trials(spec: &ExperimentSpec) -> Result<Vec<Trial>> {
    spec.validate()?;
    let jobs: Vec<_> = combos(spec)
        .into_iter()
        .flat_map(|c| (0..spec.trials).map(move |t| (c, t)))
        .collect();
    jobs.into_par_iter()
        .map(|((n, d, p, beta), trial)| {
            let seed = spec.trial_seed(trial);
            let config = ModelConfig {
                n,
                d,
                p,
                beta,
                seed,
                variant: spec.variant.clone(),
            };
            let g = generate(&config)?;
            let tree = marked_spanning_tree(&g);
            let (h, diam) = (height(&g), diameter(&g));
            let (log_n, height_ratio, diameter_ratio) = ExperimentRecord::ratios(n, h, diam);
            Ok(Trial {
                record: ExperimentRecord {
                    trial,
                    n,
                    d,
                    p,
                    beta,
                    variant: spec.variant.name(),
                    seed: seed.stream_id,
                    height: h,
                    diameter: diam,
                    semi_diameter: (d == 1).then(|| semi_diameter(&tree)),
                    weighted_height: None,
                    log_n,
                    height_ratio,
                    diameter_ratio,
                },
                marked_tree_height: tree_height(&tree),
            })
        })
        .collect()
}

fn require_trees(spec: &ExperimentSpec) -> Result<()> {
    if spec.d != [1] {
        return Err(Error::InvalidConfig(format!(
            "experiment `{}` needs the tree model, d = 1",
            spec.name
        )));
    }
    Ok(())
}

fn records(trials: &[Trial]) -> Vec<ExperimentRecord> {
    trials.iter().map(|t| t.record.clone()).collect()
}

/// Paired-seed trend: in how many trials is the largest `n` closer to
/// `target` than the smallest `n`.
fn trend(recs: &[ExperimentRecord], p: f64, target: f64, ratio: impl Fn(&ExperimentRecord) -> Option<f64>) -> (usize, usize) {
    let of_p: Vec<&ExperimentRecord> = recs.iter().filter(|r| r.p == p).collect();
    let small = of_p.iter().map(|r| r.n).min().unwrap_or(0);
    let large = of_p.iter().map(|r| r.n).max().unwrap_or(0);
    let mut wins = 0;
    let mut pairs = 0;
    for a in of_p.iter().filter(|r| r.n == small) {
        if let Some(b) = of_p.iter().find(|r| r.n == large && r.trial == a.trial) {
            if let (Some(x), Some(y)) = (ratio(a), ratio(b)) {
                pairs += 1;
                if (y - target).abs() < (x - target).abs() {
                    wins += 1;
                }
            }
        }
    }
    (wins, pairs)
}

fn band_checks(
    spec: &ExperimentSpec,
    summary: &mut ExperimentSummary,
    recs: &[ExperimentRecord],
    scale: f64,
    what: &str,
    ratio: impl Fn(&ExperimentRecord) -> Option<f64> + Copy,
) -> Result<()> {
    let n_max = spec.n.iter().copied().max().unwrap_or(1);
    let n_min = spec.n.iter().copied().min().unwrap_or(1);
    for &p in &spec.p {
        let Some(target) = HeightTarget::for_model(&spec.variant, 1, p)? else {
            continue;
        };
        let target = target.scaled(scale);
        let vals: Vec<f64> = recs
            .iter()
            .filter(|r| r.p == p && r.n == n_max)
            .filter_map(ratio)
            .collect();
        let mean = crate::stats::mean(&vals);
        summary.checks.push(Check::hard(
            &format!("{what}-band p={p} n={n_max}"),
            target.contains(mean, spec.band),
            format!(
                "mean {what}/ln n = {mean:.5}, target [{:.5}, {:.5}] widened by {}",
                target.lower, target.upper, spec.band
            ),
        ));
        if n_min < n_max {
            let (wins, pairs) = trend(recs, p, target.lower, ratio);
            summary.checks.push(Check::hard(
                &format!("{what}-trend p={p}"),
                pairs > 0 && wins as f64 >= spec.trend_fraction * pairs as f64,
                format!("n={n_max} closer than n={n_min} in {wins}/{pairs} paired trials"),
            ));
        }
    }
    Ok(())
}

/// Height over `ln n` against `[c_L, c_U]`, plus the paired trend check.
pub fn run_height_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    require_trees(spec)?;
    let trials = run_trials(spec)?;
    let recs = records(&trials);
    let mut summary = ExperimentSummary::new(&spec.name);
    summary.groups = summarize(&recs);
    band_checks(spec, &mut summary, &recs, 1.0, "height", |r| r.height_ratio)?;
    emit(spec, &recs, &summary)?;
    Ok(summary)
}

/// Diameter over `ln n` against `[2 c_L, 2 c_U]`, with the per-trial chain
/// `semi_diameter <= diameter <= 2 height`.
pub fn run_diameter_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    require_trees(spec)?;
    let trials = run_trials(spec)?;
    let recs = records(&trials);
    let mut summary = ExperimentSummary::new(&spec.name);
    summary.groups = summarize(&recs);
    band_checks(spec, &mut summary, &recs, 2.0, "diameter", |r| r.diameter_ratio)?;
    let bad_double = recs.iter().filter(|r| r.diameter > 2 * r.height).count();
    let bad_semi = recs
        .iter()
        .filter(|r| r.semi_diameter.is_some_and(|s| s > r.diameter as i64))
        .count();
    summary.checks.push(Check::hard(
        "diameter<=2height",
        bad_double == 0,
        format!("{bad_double} violations in {} trials", recs.len()),
    ));
    summary.checks.push(Check::hard(
        "semi<=diameter",
        bad_semi == 0,
        format!("{bad_semi} violations in {} trials", recs.len()),
    ));
    emit(spec, &recs, &summary)?;
    Ok(summary)
}

/// `8 e^p ln n / p`.
pub fn webgraph_diameter_bound(n: usize, p: f64) -> f64 {
    8.0 * p.exp() * (n as f64).ln() / p
}

/// Every sampled diameter against `8 e^p ln n / p`, for any `d` and either
/// walk model.
pub fn run_webgraph_bound_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let trials = run_trials(spec)?;
    let recs = records(&trials);
    let mut summary = ExperimentSummary::new(&spec.name);
    summary.groups = summarize(&recs);

    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for r in recs.iter().filter(|r| r.n >= 2) {
        if r.diameter as f64 > webgraph_diameter_bound(r.n, r.p) {
            violations += 1;
        }
        max_ratio = max_ratio.max(r.diameter as f64 * r.p / r.log_n);
    }
    summary.checks.push(Check::hard(
        "diameter<=8e^p ln n/p",
        violations == 0,
        format!(
            "{violations} violations in {} trials; max diameter/(ln n/p) = {max_ratio:.4}",
            recs.len()
        ),
    ));
    let tree_short = trials
        .iter()
        .filter(|t| t.marked_tree_height < t.record.height)
        .count();
    summary.checks.push(Check::hard(
        "tree-height>=graph-height",
        tree_short == 0,
        format!("{tree_short} trials with a marked tree shallower than the graph"),
    ));

    // Soft: more edges should not lengthen the diameter.
    if let (Some(&d_lo), Some(&d_hi)) = (spec.d.iter().min(), spec.d.iter().max()) {
        if d_lo < d_hi {
            let mut ok = 0;
            let mut total = 0;
            for lo in summary.groups.iter().filter(|g| g.d == d_lo) {
                if let Some(hi) = summary
                    .groups
                    .iter()
                    .find(|g| g.d == d_hi && (g.n, g.p, g.beta) == (lo.n, lo.p, lo.beta))
                {
                    total += 1;
                    if hi.mean_diameter <= lo.mean_diameter {
                        ok += 1;
                    }
                }
            }
            summary.checks.push(Check::soft(
                "diameter-decreases-with-d",
                ok == total,
                format!("mean diameter at d={d_hi} <= d={d_lo} in {ok}/{total} settings"),
            ));
        }
    }
    summary.extra = json!({ "max_diameter_over_log_n_times_p": max_ratio });
    emit(spec, &recs, &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceRow {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub l1_beta0: f64,
    pub beta1_uniform: bool,
}

/// Walk law against PageRank on seeded snapshots, and sampled walk
/// endpoints against the walk law on one 200-vertex graph.
pub fn run_equivalence_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &n in &spec.n {
        for &d in &spec.d {
            for &p in &spec.p {
                let g = generate(&ModelConfig::surfer(n, d, p, spec.trial_seed(0)))?;
                let pi = pagerank(&g, p, DEFAULT_TOL)?;
                let tau = walk_attachment_distribution(&g, p, 0.0, DEFAULT_TOL)?;
                let jump = walk_attachment_distribution(&g, p, 1.0, DEFAULT_TOL)?;
                rows.push(EquivalenceRow {
                    n,
                    d,
                    p,
                    l1_beta0: pi.l1(&tau),
                    beta1_uniform: jump == VertexDistribution::uniform(n),
                });
            }
        }
    }
    let mut summary = ExperimentSummary::new(&spec.name);
    let worst = rows.iter().map(|r| r.l1_beta0).fold(0.0, f64::max);
    summary.checks.push(Check::hard(
        "l1(tau,pi)<=2tol",
        worst <= 2.0 * DEFAULT_TOL,
        format!("worst L1 distance {worst:.3e} over {} graphs", rows.len()),
    ));
    summary.checks.push(Check::hard(
        "beta=1-uniform",
        rows.iter().all(|r| r.beta1_uniform),
        "endpoint law of zero-length walks".into(),
    ));

    let (d, p) = (spec.d[0], spec.p[0]);
    let beta = *spec.beta.last().unwrap_or(&0.0);
    let g = generate(&ModelConfig::surfer(200, d, p, spec.trial_seed(1)))?;
    let tau = walk_attachment_distribution(&g, p, beta, DEFAULT_TOL)?;
    let law = WalkLength::new(p, beta)?;
    let mut stream = spec.trial_seed(2).stream();
    let mut counts = vec![0u64; g.n()];
    for _ in 0..spec.samples {
        let start = stream.below(g.n());
        let len = law.sample(&mut stream);
        counts[walk_endpoint(&g, start, len, &mut stream)] += 1;
    }
    let total = spec.samples as f64;
    let max_z = counts
        .iter()
        .zip(tau.probs())
        .map(|(&c, &q)| {
            let sd = (total * q * (1.0 - q)).sqrt();
            if sd == 0.0 { 0.0 } else { (c as f64 - total * q).abs() / sd }
        })
        .fold(0.0, f64::max);
    summary.checks.push(Check::hard(
        "sampled-walks-max-z<=4",
        max_z <= 4.0,
        format!("{} walks, d={d} p={p} beta={beta}: max standardized deviation {max_z:.3}", spec.samples),
    ));
    summary.extra = json!({ "snapshots": rows, "max_z": max_z });
    emit(spec, &[], &summary)?;
    Ok(summary)
}

/// Thinned `Y` sums at `m` terms: fraction of `samples` runs with sum at
/// least `a m` for each `a`.
fn sampled_hat_y_tails(m: u32, p: f64, a_grid: &[f64], samples: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    let geo = Geometric::new(p)?;
    let mut stream = seed.stream();
    let mut hits = vec![0u64; a_grid.len()];
    for _ in 0..samples {
        let mut sum: i64 = 0;
        for _ in 0..m {
            let keep = stream.coin();
            let y = 1 - geo.sample(&mut stream) as i64;
            if keep {
                sum += y;
            }
        }
        for (h, &a) in hits.iter_mut().zip(a_grid) {
            if sum as f64 >= a * m as f64 - 1e-9 {
                *h += 1;
            }
        }
    }
    Ok(hits.into_iter().map(|h| h as f64 / samples as f64).collect())
}

/// Thinned reflected sums at `m` terms, one kept/zeroed coin per step;
/// fraction of runs with sum above `a m` for each `a`.
fn sampled_hat_x_tails(m: u32, p: f64, a_grid: &[f64], samples: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    let geo = Geometric::new(p)?;
    let mut stream = seed.stream();
    let mut hits = vec![0u64; a_grid.len()];
    for _ in 0..samples {
        let mut w: i64 = 0;
        for _ in 0..m {
            let keep = stream.coin();
            let y = 1 - geo.sample(&mut stream) as i64;
            if keep {
                w = (w + y).max(1);
            }
        }
        for (h, &a) in hits.iter_mut().zip(a_grid) {
            if w as f64 > a * m as f64 + 1e-9 {
                *h += 1;
            }
        }
    }
    Ok(hits.into_iter().map(|h| h as f64 / samples as f64).collect())
}

/// Exact tails against the Chernoff-type bounds, plus the lower-bound
/// directions at larger `m`.
pub fn run_large_deviation_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    let mut summary = ExperimentSummary::new(&spec.name);
    let suite = chernoff_suite(&ChernoffGrid::default())?;
    for f in &suite.families {
        summary.checks.push(Check::hard(
            &format!("exact-{}", f.family),
            f.violations == 0,
            format!("{} violations in {} checks, worst ratio {:.4}", f.violations, f.checks, f.worst_ratio),
        ));
    }

    // Lower rate of the thinned Y sums, evaluated exactly at m = 200.
    let m = 200u32;
    let a_grid: Vec<f64> = (1..10).map(|i| i as f64 * 0.05).collect();
    let mut rate_rows = Vec::new();
    let mut rate_ok = true;
    let mut mc_ok = true;
    let mut upper_ok = true;
    for (k, &p) in spec.p.iter().enumerate() {
        let rates = Rates::new(p)?;
        let sampled = sampled_hat_y_tails(m, p, &a_grid, spec.samples, spec.trial_seed(2 * k))?;
        let sampled_x = sampled_hat_x_tails(m, p, &a_grid, spec.samples, spec.trial_seed(2 * k + 1))?;
        let c_prime = suite
            .constants
            .iter()
            .find(|c| c.p == p)
            .map_or(100.0, |c| c.c_prime);
        for (i, &a) in a_grid.iter().enumerate() {
            let exact = hat_y_sum_tail(m, a * m as f64, p)?;
            let floor = -(2.0 * rates.g_l(a)).ln() - 0.1;
            let rate = exact.ln() / m as f64;
            rate_ok &= rate >= floor;
            let sd = (exact * (1.0 - exact) / spec.samples as f64).sqrt();
            if exact >= 1e-3 {
                mc_ok &= (sampled[i] - exact).abs() <= 4.0 * sd;
            }
            let bound = hat_x_sum_bound(m, a, p, c_prime)?;
            let sd_x = (sampled_x[i] * (1.0 - sampled_x[i]) / spec.samples as f64).sqrt();
            upper_ok &= sampled_x[i] <= bound + 3.0 * sd_x;
            rate_rows.push(json!({
                "p": p, "a": a, "exact_hat_y_tail": exact, "log_tail_over_m": rate,
                "rate_floor": floor, "sampled_hat_y_tail": sampled[i],
                "sampled_hat_x_tail": sampled_x[i], "hat_x_bound": bound,
            }));
        }
    }
    summary.checks.push(Check::hard(
        "hat-y-rate>=-ln(2gL)-0.1",
        rate_ok,
        format!("exact tails at m={m} over {} points", rate_rows.len()),
    ));
    summary.checks.push(Check::hard(
        "hat-y-sampled-within-4sd",
        mc_ok,
        format!("{} samples per p", spec.samples),
    ));
    summary.checks.push(Check::hard(
        "hat-x-sampled<=bound+3sd",
        upper_ok,
        format!("{} samples per p", spec.samples),
    ));

    // Erlang lower direction: the per-m log gap to exp(-Upsilon(x) m)
    // shrinks toward 0.
    let mut gap_rows = Vec::new();
    let mut gap_ok = true;
    for x in [0.3, 0.6, 0.9] {
        let ups = theory::upsilon(x)?;
        let gaps: Vec<f64> = (1..=10)
            .map(|j| {
                let m = 10 * j;
                erlang_lower_tail(m, x).map(|t| (-ups * m as f64 - t.ln()) / m as f64)
            })
            .collect::<Result<_>>()?;
        gap_ok &= gaps.iter().all(|&g| g >= 0.0) && gaps.windows(2).all(|w| w[1] <= w[0]);
        gap_rows.push(json!({ "x": x, "gaps": gaps }));
    }
    summary.checks.push(Check::hard(
        "erlang-log-gap-shrinks",
        gap_ok,
        "m = 10, 20, ..., 100".into(),
    ));
    summary.extra = json!({
        "constants": suite.constants,
        "thinned_sums": rate_rows,
        "erlang_gaps": gap_rows,
    });
    emit(spec, &[], &summary)?;
    Ok(summary)
}
