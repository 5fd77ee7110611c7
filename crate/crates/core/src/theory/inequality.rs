//! Grid check of the inequality that drives the PageRank diameter bound:
//! `-c Upsilon(1/c) + c ln f(2 - eta/c) < max(eta(1-p) ln(1-p^3), -0.15 p eta) - 1`
//! for `eta = 4 e^p / p` and `0 < c <= p eta`.

use serde::Serialize;

use crate::error::Result;

use super::functions::{upsilon_unchecked, Rates};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub points: usize,
    pub violations: usize,
    pub min_margin: f64,
    pub argmin_p: f64,
    pub argmin_c: f64,
}

impl InequalityReport {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.min_margin > 0.0
    }
}

/// Right side minus left side at one point.
pub fn technical_margin(p: f64, c: f64) -> Result<f64> {
    let rates = Rates::new(p)?;
    let eta = 4.0 * p.exp() / p;
    let rhs = (eta * (1.0 - p) * (1.0 - p.powi(3)).ln()).max(-0.15 * p * eta) - 1.0;
    let lhs = -c * upsilon_unchecked(1.0 / c) + c * rates.log_f(2.0 - eta / c);
    Ok(rhs - lhs)
}

/// Evaluates the margin at every `(p, c)` with `c = frac * p * eta`.
pub fn technical_inequality_check(p_grid: &[f64], c_fracs: &[f64]) -> Result<InequalityReport> {
    let mut report = InequalityReport {
        points: 0,
        violations: 0,
        min_margin: f64::INFINITY,
        argmin_p: f64::NAN,
        argmin_c: f64::NAN,
    };
    for &p in p_grid {
        let eta = 4.0 * p.exp() / p;
        for &frac in c_fracs {
            let c = frac * p * eta;
            let margin = technical_margin(p, c)?;
            report.points += 1;
            if margin.is_nan() || margin <= 0.0 {
                report.violations += 1;
            }
            if margin < report.min_margin {
                report.min_margin = margin;
                report.argmin_p = p;
                report.argmin_c = c;
            }
        }
    }
    Ok(report)
}

/// Midpoint grid `(i - 1/2) / n` for `i = 1..=n`.
pub fn midpoint_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect()
}

/// `i / n` for `i = 1..=n`.
pub fn right_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}
