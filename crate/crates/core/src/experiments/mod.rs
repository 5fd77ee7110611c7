//! Seeded Monte Carlo harness: records, summaries and file output.
//!
//! Trial `i` of an experiment named `name` draws from stream
//! `seed.derive(name, i)`, so the same trial index is paired across every
//! parameter combination and reruns are bit-identical.

mod runners;

pub use runners::{
    run_diameter_experiment, run_equivalence_experiment, run_height_experiment,
    run_large_deviation_experiment, run_webgraph_bound_experiment, EquivalenceRow, HeightTarget,
};

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Variant;
use crate::sampling::SeedSpec;
use crate::stats;

/// Stated in every summary: the theorems are limits, the checks are not.
pub const FINITE_N_NOTE: &str = "The height and diameter theorems hold asymptotically almost surely \
as n grows; these are finite-n banded checks, not exact reproductions.";

/// One experiment: a parameter grid, a trial count and where to write.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    pub p: Vec<f64>,
    pub beta: Vec<f64>,
    pub variant: Variant,
    pub trials: usize,
    pub seed: SeedSpec,
    /// CSV path; the JSON summary goes next to it with a `.json` extension.
    pub out: Option<PathBuf>,
    /// Relative half-width of the acceptance band around the theory target.
    pub band: f64,
    /// Fraction of paired trials in which the largest `n` must beat the
    /// smallest.
    pub trend_fraction: f64,
    /// Monte Carlo sample count for experiments that draw walks or sums.
    pub samples: usize,
}

impl ExperimentSpec {
    pub fn new(name: &str, variant: Variant, seed: SeedSpec) -> Self {
        ExperimentSpec {
            name: name.into(),
            n: vec![1000],
            d: vec![1],
            p: vec![0.5],
            beta: vec![0.0],
            variant,
            trials: 10,
            seed,
            out: None,
            band: 0.25,
            trend_fraction: 0.7,
            samples: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("experiment `{}`: {what}", self.name)));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return bad("n values must be at least 1");
        }
        if self.d.is_empty() || self.d.contains(&0) {
            return bad("d values must be at least 1");
        }
        if self.p.is_empty() || self.beta.is_empty() {
            return bad("p and beta lists must be non-empty");
        }
        if self.band.is_nan() || self.band < 0.0 {
            return bad("band must be nonnegative");
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> SeedSpec {
        self.seed.derive(&self.name, trial as u64)
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub trial: usize,
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub beta: f64,
    pub variant: String,
    /// Stream id of the trial under the spec's master seed.
    pub seed: u64,
    pub height: u32,
    pub diameter: u32,
    pub semi_diameter: Option<i64>,
    pub weighted_height: Option<i64>,
    pub log_n: f64,
    pub height_ratio: Option<f64>,
    pub diameter_ratio: Option<f64>,
}

impl ExperimentRecord {
    pub(crate) fn ratios(n: usize, height: u32, diameter: u32) -> (f64, Option<f64>, Option<f64>) {
        let log_n = (n as f64).ln();
        if n < 2 {
            return (log_n, None, None);
        }
        (log_n, Some(height as f64 / log_n), Some(diameter as f64 / log_n))
    }
}

pub fn write_records(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Statistics of one parameter combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub beta: f64,
    pub trials: usize,
    pub mean_height: f64,
    pub mean_diameter: f64,
    pub max_diameter: u32,
    pub mean_height_ratio: f64,
    pub se_height_ratio: f64,
    pub median_height_ratio: f64,
    pub q05_height_ratio: f64,
    pub q95_height_ratio: f64,
    pub mean_diameter_ratio: f64,
    pub se_diameter_ratio: f64,
}

/// Groups records by `(n, d, p, beta)` in first-seen order.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<GroupSummary> {
    let mut keys: Vec<(usize, usize, f64, f64)> = Vec::new();
    for r in records {
        let k = (r.n, r.d, r.p, r.beta);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(n, d, p, beta)| {
            let rows: Vec<&ExperimentRecord> = records
                .iter()
                .filter(|r| (r.n, r.d, r.p, r.beta) == (n, d, p, beta))
                .collect();
            let heights: Vec<f64> = rows.iter().map(|r| r.height as f64).collect();
            let diameters: Vec<f64> = rows.iter().map(|r| r.diameter as f64).collect();
            let hr: Vec<f64> = rows.iter().filter_map(|r| r.height_ratio).collect();
            let dr: Vec<f64> = rows.iter().filter_map(|r| r.diameter_ratio).collect();
            GroupSummary {
                n,
                d,
                p,
                beta,
                trials: rows.len(),
                mean_height: stats::mean(&heights),
                mean_diameter: stats::mean(&diameters),
                max_diameter: rows.iter().map(|r| r.diameter).max().unwrap_or(0),
                mean_height_ratio: stats::mean(&hr),
                se_height_ratio: stats::std_error(&hr),
                median_height_ratio: stats::median(&hr),
                q05_height_ratio: stats::quantile(&hr, 0.05),
                q95_height_ratio: stats::quantile(&hr, 0.95),
                mean_diameter_ratio: stats::mean(&dr),
                se_diameter_ratio: stats::std_error(&dr),
            }
        })
        .collect()
}

/// A named pass/fail outcome. Soft checks are reported and never fail a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub soft: bool,
    pub detail: String,
}

impl Check {
    pub fn hard(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            passed,
            soft: false,
            detail,
        }
    }

    pub fn soft(name: &str, passed: bool, detail: String) -> Self {
        Check {
            soft: true,
            ..Check::hard(name, passed, detail)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub note: String,
    pub groups: Vec<GroupSummary>,
    pub checks: Vec<Check>,
    /// Experiment-specific details.
    pub extra: serde_json::Value,
}

impl ExperimentSummary {
    pub(crate) fn new(name: &str) -> Self {
        ExperimentSummary {
            name: name.into(),
            note: FINITE_N_NOTE.into(),
            groups: Vec::new(),
            checks: Vec::new(),
            extra: serde_json::Value::Null,
        }
    }

    /// True when every hard check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.soft || c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    spec: &'a ExperimentSpec,
    generated_unix_secs: u64,
    summary: &'a ExperimentSummary,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the CSV (if any records) and the JSON sidecar when `spec.out` is
/// set. The timestamp lives only in the sidecar.
pub(crate) fn emit(
    spec: &ExperimentSpec,
    records: &[ExperimentRecord],
    summary: &ExperimentSummary,
) -> Result<()> {
    let Some(out) = &spec.out else {
        return Ok(());
    };
    if !records.is_empty() {
        write_records(out, records)?;
    }
    let json_path = sidecar_path(out);
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let sidecar = Sidecar {
        spec,
        generated_unix_secs: secs,
        summary,
    };
    let file = File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &sidecar)?;
    w.write_all(b"\n").map_err(|e| Error::io(&json_path, e))?;
    w.flush().map_err(|e| Error::io(&json_path, e))
}
