//! Exact tails checked against their large-deviation bounds on fixed grids.

use serde::Serialize;

use crate::error::Result;

use super::oracles::{
    chernoff_bound, erlang_lower_tail, geo_plus_one_upper_tail, hat_x_sum_bound, hat_x_sum_tail,
    x_sum_bound, x_sum_tail, ChernoffKind,
};

/// Slack for floating-point noise when the tail equals its bound.
const ROUNDING: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub checks: usize,
    pub violations: usize,
    /// Largest tail-to-bound ratio seen.
    pub worst_ratio: f64,
}

impl FamilyReport {
    fn new(family: &str) -> Self {
        FamilyReport {
            family: family.into(),
            checks: 0,
            violations: 0,
            worst_ratio: 0.0,
        }
    }

    fn record(&mut self, exact: f64, bound: f64) {
        self.checks += 1;
        if exact > bound * (1.0 + ROUNDING) + f64::MIN_POSITIVE {
            self.violations += 1;
        }
        if bound > 0.0 {
            self.worst_ratio = self.worst_ratio.max(exact / bound);
        }
    }
}

/// Constant chosen for one `p` in the polynomial-times-exponential bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibratedConstant {
    pub p: f64,
    pub c: f64,
    pub c_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChernoffReport {
    pub families: Vec<FamilyReport>,
    pub constants: Vec<CalibratedConstant>,
}

impl ChernoffReport {
    pub fn violations(&self) -> usize {
        self.families.iter().map(|f| f.violations).sum()
    }
}

/// Grids of the suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChernoffGrid {
    pub exp_m: u32,
    pub exp_x: Vec<f64>,
    pub geo_m: u32,
    pub geo_p: Vec<f64>,
    /// Multiples of `1/p` used as `kappa`.
    pub geo_kappa: Vec<f64>,
    pub x_m: u32,
    pub x_p: Vec<f64>,
    pub x_a: Vec<f64>,
    /// Largest `m` used to pick `C` and `C'`.
    pub calibration_m: u32,
    pub ladder: Vec<f64>,
}

impl Default for ChernoffGrid {
    fn default() -> Self {
        ChernoffGrid {
            exp_m: 30,
            exp_x: (1..=30).map(|i| i as f64 * 0.05).collect(),
            geo_m: 20,
            geo_p: vec![0.2, 0.3, 0.5, 0.7, 0.9],
            geo_kappa: vec![1.0, 1.5, 2.0],
            x_m: 15,
            x_p: vec![0.1, 0.2, 0.3, 0.5, 0.7, 0.9],
            x_a: (0..=20).map(|i| i as f64 * 0.05).collect(),
            calibration_m: 2,
            ladder: crate::tolerances::Tolerances::default().constant_ladder,
        }
    }
}

/// Smallest ladder value covering every ratio at `m <= calibration_m`.
fn calibrate(ladder: &[f64], ratios: impl Iterator<Item = f64>) -> f64 {
    let need = ratios.fold(0.0, f64::max);
    ladder
        .iter()
        .copied()
        .find(|&c| c >= need)
        .unwrap_or(f64::INFINITY)
}

pub fn chernoff_suite(grid: &ChernoffGrid) -> Result<ChernoffReport> {
    let mut exp = FamilyReport::new("erlang");
    for m in 1..=grid.exp_m {
        for &x in &grid.exp_x {
            exp.record(
                erlang_lower_tail(m, x)?,
                chernoff_bound(ChernoffKind::ExpSum, m, x, 0.0)?,
            );
        }
    }

    let mut geo = FamilyReport::new("negative-binomial");
    for &p in &grid.geo_p {
        for m in 1..=grid.geo_m {
            for &k in &grid.geo_kappa {
                let kappa = k / p;
                geo.record(
                    geo_plus_one_upper_tail(m, kappa, p)?,
                    chernoff_bound(ChernoffKind::GeoPlusOneSum, m, kappa, p)?,
                );
            }
        }
    }

    let mut xs = FamilyReport::new("reflected-sum");
    let mut hats = FamilyReport::new("thinned-reflected-sum");
    let mut constants = Vec::new();
    for &p in &grid.x_p {
        let mut x_ratios = Vec::new();
        let mut hat_ratios = Vec::new();
        for m in 1..=grid.calibration_m {
            for &a in &grid.x_a {
                x_ratios.push(x_sum_tail(m, a, p)? / x_sum_bound(m, a, p, 1.0)?);
                hat_ratios.push(hat_x_sum_tail(m, a, p)? / hat_x_sum_bound(m, a, p, 1.0)?);
            }
        }
        let c = calibrate(&grid.ladder, x_ratios.into_iter());
        let c_prime = calibrate(&grid.ladder, hat_ratios.into_iter());
        for m in 1..=grid.x_m {
            for &a in &grid.x_a {
                xs.record(x_sum_tail(m, a, p)?, x_sum_bound(m, a, p, c)?);
                hats.record(hat_x_sum_tail(m, a, p)?, hat_x_sum_bound(m, a, p, c_prime)?);
            }
        }
        constants.push(CalibratedConstant { p, c, c_prime });
    }

    Ok(ChernoffReport {
        families: vec![exp, geo, xs, hats],
        constants,
    })
}
