//! The height constants `c_L`, `c_U` and the equations defining them.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

use super::functions::{upsilon_unchecked, Rates};
use super::roots::{bisect, golden_max};

/// Open-interval margin for brackets whose ends are singular.
const EDGE: f64 = 1e-15;

/// `ln(1-p) + ln(2-s) - ln(1-s) - 1/s`, whose root in `(0, 1)` is `s(p)`.
fn mu(p: f64, s: f64) -> f64 {
    (1.0 - p).ln() + (2.0 - s).ln() - (1.0 - s).ln() - 1.0 / s
}

/// Unique `s` in `(0, 1)` with `s ln((1-p)(2-s)/(1-s)) = 1`.
pub fn solve_s(p: f64) -> Result<f64> {
    ensure(p > 0.0 && p < 1.0, "p", p, "0 < p < 1")?;
    // Bisect down to adjacent floats: near p = 1 the root sits close to 1,
    // where the equation is steep.
    Ok(bisect(|s| mu(p, s), EDGE, 1.0 - EDGE, 0.0))
}

/// `s ln((1-p)(2-s)/(1-s)) - 1`.
pub fn s_equation_residual(p: f64, s: f64) -> f64 {
    s * ((1.0 - p) * (2.0 - s) / (1.0 - s)).ln() - 1.0
}

/// Unique `p0` in `(0, 1/2)` with `ln((1-p)/p) = (1-p)/(1-2p)`, computed once.
pub fn solve_p0() -> f64 {
    static P0: OnceLock<f64> = OnceLock::new();
    *P0.get_or_init(|| {
        let r = |p: f64| ((1.0 - p) / p).ln() - (1.0 - p) / (1.0 - 2.0 * p);
        bisect(r, 1e-9, 0.5 - 1e-12, 0.0)
    })
}

/// Lower height constant `exp(1/s) s (2-s) p`.
pub fn c_l(p: f64) -> Result<f64> {
    let s = solve_s(p)?;
    Ok(c_l_from(p, s))
}

fn c_l_from(p: f64, s: f64) -> f64 {
    (1.0 / s).exp() * s * (2.0 - s) * p
}

/// Upper height constant: `c_L` from `p0` on, `1 / ln((1-p)/p)` below it.
pub fn c_u(p: f64) -> Result<f64> {
    let s = solve_s(p)?;
    Ok(c_u_from(p, s))
}

fn c_u_from(p: f64, s: f64) -> f64 {
    if p >= solve_p0() {
        c_l_from(p, s)
    } else {
        1.0 / ((1.0 - p) / p).ln()
    }
}

/// Everything the height theorem attaches to one value of `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryProfile {
    pub p: f64,
    pub s: f64,
    pub p0: f64,
    pub c_l: f64,
    pub c_u: f64,
    pub a_star: f64,
    pub rho_star: f64,
}

impl TheoryProfile {
    pub fn new(p: f64) -> Result<Self> {
        let rates = Rates::new(p)?;
        let s = solve_s(p)?;
        let a_star = rates.phi_inverse(s);
        Ok(TheoryProfile {
            p,
            s,
            p0: solve_p0(),
            c_l: c_l_from(p, s),
            c_u: c_u_from(p, s),
            a_star,
            rho_star: 1.0 - a_star / s,
        })
    }
}

/// Maximizer of `a / tau(a)` over `[0, a_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalSolution {
    pub a: f64,
    pub rho: f64,
    pub ratio: f64,
    pub a_max: f64,
    pub tau_at_a_max: f64,
}

impl VariationalSolution {
    /// `ln g_U(a) + rho - 1 - ln rho`, zero at a solution.
    pub fn residual(&self, p: f64) -> Result<f64> {
        let g = Rates::new(p)?.g_u(self.a);
        Ok(g.ln() + self.rho - 1.0 - self.rho.ln())
    }
}

/// `tau` in `(0, 1]` solving `ln g_U(a) + tau - 1 - ln tau = 0`, i.e.
/// `Upsilon(tau) = -ln g_U(a)`; requires `g_U(a) <= 1`.
fn tau(rates: &Rates, a: f64) -> f64 {
    let y = -rates.g_u(a).ln();
    if y <= 0.0 {
        return 1.0;
    }
    // Upsilon(e^(-y-1)) > y, so the root lies above that point.
    bisect(|t| upsilon_unchecked(t) - y, (-y - 1.0).exp(), 1.0, 0.0)
}

/// `c_U` as the supremum of `a / tau(a)`, found by a grid scan refined with
/// golden-section search.
pub fn c_u_variational(p: f64, grid_size: usize) -> Result<VariationalSolution> {
    let rates = Rates::new(p)?;
    ensure(grid_size >= 3, "grid_size", grid_size as f64, "at least 3")?;
    let a_max = bisect(|a| rates.g_u(a).ln(), 0.0, 1.0, 0.0);
    let ratio = |a: f64| a / tau(&rates, a.clamp(0.0, a_max));
    let step = a_max / (grid_size - 1) as f64;
    let best = (0..grid_size)
        .map(|i| (i, ratio(i as f64 * step)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo = best.saturating_sub(1) as f64 * step;
    let hi = ((best + 1) as f64 * step).min(a_max);
    let a = golden_max(ratio, lo, hi, 1e-13);
    let rho = tau(&rates, a);
    Ok(VariationalSolution {
        a,
        rho,
        ratio: a / rho,
        a_max,
        tau_at_a_max: tau(&rates, a_max),
    })
}
