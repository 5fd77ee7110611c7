//! Every numerical tolerance and acceptance band in one record.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bracket width for bisection on the implicit equations.
    pub root_xtol: f64,
    /// Generic closed-form comparisons.
    pub compare: f64,
    /// Grid points for monotonicity and convexity scans.
    pub grid_points: usize,
    /// Exact pmf against brute-force convolution.
    pub pmf: f64,
    /// Variational `c_U` against the closed form.
    pub variational: f64,
    /// Power-iteration and walk-series tolerance.
    pub pagerank: f64,
    /// Significance level of two-sample and goodness-of-fit tests.
    pub alpha: f64,
    /// Relative band around `c_L` for mean height over `ln n`.
    pub height_band: f64,
    /// Fraction of paired seeds in which the larger `n` must be closer.
    pub trend_fraction: f64,
    /// Interval for the median of `ln |V(T_t)| / t`.
    pub growth_band: (f64, f64),
    /// Ladder searched for the constants of the polynomial-times-exponential
    /// tail bounds.
    pub constant_ladder: Vec<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_xtol: 1e-12,
            compare: 1e-9,
            grid_points: 1000,
            pmf: 1e-12,
            variational: 1e-6,
            pagerank: 1e-10,
            alpha: 1e-3,
            height_band: 0.25,
            trend_fraction: 0.7,
            growth_band: (0.8, 1.2),
            constant_ladder: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
        }
    }
}
