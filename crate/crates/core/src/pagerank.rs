//! PageRank by power iteration and the law of the attachment walk.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::graph::MultiDigraph;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Probability vector indexed by vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexDistribution(pub Vec<f64>);

impl VertexDistribution {
    pub fn uniform(n: usize) -> Self {
        VertexDistribution(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Nonnegative entries summing to 1 within `eps`.
    pub fn is_valid(&self, eps: f64) -> bool {
        self.0.iter().all(|&x| x >= 0.0) && (self.total() - 1.0).abs() <= eps
    }

    pub fn l1(&self, other: &Self) -> f64 {
        l1(&self.0, &other.0)
    }
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `out = P^T x`: every edge slot carries `x[u] / d` to its head.
fn push_forward(g: &MultiDigraph, x: &[f64], out: &mut [f64]) {
    let d = g.d();
    let share = 1.0 / d as f64;
    out.iter_mut().for_each(|o| *o = 0.0);
    for (u, &mass) in x.iter().enumerate() {
        let m = mass * share;
        for &t in g.out_slots(u) {
            out[t] += m;
        }
    }
}

/// `p * sigma + (1 - p) * P^T x` into `out`.
fn pagerank_step(g: &MultiDigraph, p: f64, x: &[f64], out: &mut [f64]) {
    push_forward(g, x, out);
    let jump = p / g.n() as f64;
    for o in out.iter_mut() {
        *o = jump + (1.0 - p) * *o;
    }
}

fn check(p: f64, tol: f64) -> Result<()> {
    ensure(p > 0.0 && p <= 1.0, "p", p, "0 < p <= 1")?;
    ensure(tol > 0.0 && tol.is_finite(), "tol", tol, "tol > 0")
}

/// L1 norm of `p * sigma + (1 - p) * P^T pi - pi`.
pub fn stationarity_residual(g: &MultiDigraph, p: f64, pi: &VertexDistribution) -> f64 {
    let mut next = vec![0.0; g.n()];
    pagerank_step(g, p, &pi.0, &mut next);
    l1(&next, &pi.0)
}

/// PageRank with jump probability `p`, iterated from the uniform vector.
///
/// The map is a `(1 - p)`-contraction in L1, so stopping once a step moves
/// less than `p * tol` leaves both the residual and the distance to the fixed
/// point below `tol`.
pub fn pagerank(g: &MultiDigraph, p: f64, tol: f64) -> Result<VertexDistribution> {
    check(p, tol)?;
    let mut cur = VertexDistribution::uniform(g.n()).0;
    let mut next = vec![0.0; g.n()];
    loop {
        pagerank_step(g, p, &cur, &mut next);
        let step = l1(&cur, &next);
        std::mem::swap(&mut cur, &mut next);
        if step <= p * tol {
            return Ok(VertexDistribution(cur));
        }
    }
}

/// Exact endpoint law of an `L(p, beta)`-length walk from a uniform vertex:
/// `beta * sigma + (1 - beta) * sum_k (1-p)^k p P^k sigma`.
///
/// The series stops at the first `K` with `(1-p)^(K+1) <= tol / 4`, and the
/// remaining mass is placed on `P^(K+1) sigma`, which keeps the L1 error
/// under `tol / 2`.
pub fn walk_attachment_distribution(
    g: &MultiDigraph,
    p: f64,
    beta: f64,
    tol: f64,
) -> Result<VertexDistribution> {
    check(p, tol)?;
    ensure((0.0..=1.0).contains(&beta), "beta", beta, "0 <= beta <= 1")?;
    let n = g.n();
    let sigma = VertexDistribution::uniform(n).0;
    let mut acc = vec![0.0; n];
    let mut power = sigma.clone();
    let mut scratch = vec![0.0; n];
    let mut weight = p; // (1-p)^k p
    let mut tail = 1.0 - p; // (1-p)^(k+1)
    loop {
        for (a, x) in acc.iter_mut().zip(&power) {
            *a += weight * x;
        }
        push_forward(g, &power, &mut scratch);
        std::mem::swap(&mut power, &mut scratch);
        if tail <= tol / 4.0 {
            for (a, x) in acc.iter_mut().zip(&power) {
                *a += tail * x;
            }
            break;
        }
        weight *= 1.0 - p;
        tail *= 1.0 - p;
    }
    let probs = acc
        .iter()
        .zip(&sigma)
        .map(|(w, s)| beta * s + (1.0 - beta) * w)
        .collect();
    Ok(VertexDistribution(probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, walk_endpoint, ModelConfig};
    use crate::sampling::{SeedSpec, WalkLength};
    use crate::stats::chi_square_gof;

    fn graph(n: usize, d: usize, seed: u64) -> MultiDigraph {
        generate(&ModelConfig::surfer(n, d, 0.5, SeedSpec::new(seed, 0))).unwrap()
    }

    #[test]
    fn trivial_cases() {
        for d in 1..4 {
            let pi = pagerank(&MultiDigraph::root(d), 0.3, DEFAULT_TOL).unwrap();
            assert_eq!(pi.0, vec![1.0]);
        }
        let g = graph(40, 2, 1);
        let pi = pagerank(&g, 1.0, DEFAULT_TOL).unwrap();
        assert!(pi.l1(&VertexDistribution::uniform(40)) < 1e-15);
        let tau = walk_attachment_distribution(&g, 0.4, 1.0, DEFAULT_TOL).unwrap();
        assert_eq!(tau, VertexDistribution::uniform(40));
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = graph(5, 1, 0);
        assert!(pagerank(&g, 0.5, 0.0).is_err());
        assert!(pagerank(&g, 0.0, 1e-9).is_err());
        assert!(walk_attachment_distribution(&g, 0.5, 1.5, 1e-9).is_err());
    }

    #[test]
    fn walk_law_equals_pagerank() {
        for n in [1, 2, 50, 200] {
            for d in 1..4 {
                for p in [0.2, 0.5, 0.9] {
                    let g = graph(n, d, (n * d) as u64);
                    let pi = pagerank(&g, p, DEFAULT_TOL).unwrap();
                    let tau = walk_attachment_distribution(&g, p, 0.0, DEFAULT_TOL).unwrap();
                    assert!(pi.is_valid(1e-10) && tau.is_valid(1e-10));
                    assert!(stationarity_residual(&g, p, &pi) <= DEFAULT_TOL);
                    assert!(pi.l1(&tau) <= 2.0 * DEFAULT_TOL, "n={n} d={d} p={p}");
                }
            }
        }
    }

    #[test]
    fn residual_contracts_per_step() {
        let g = graph(200, 3, 7);
        let p = 0.2;
        let mut cur = VertexDistribution::uniform(200);
        let mut prev = stationarity_residual(&g, p, &cur);
        for _ in 0..40 {
            let mut next = vec![0.0; 200];
            pagerank_step(&g, p, &cur.0, &mut next);
            cur = VertexDistribution(next);
            let r = stationarity_residual(&g, p, &cur);
            assert!(r <= prev * (1.0 - p + 1e-12) + 1e-300);
            prev = r;
        }
    }

    #[test]
    fn monte_carlo_walks_match_series() {
        let g = graph(200, 2, 11);
        let (p, beta) = (0.3, 0.25);
        let tau = walk_attachment_distribution(&g, p, beta, DEFAULT_TOL).unwrap();
        let law = WalkLength::new(p, beta).unwrap();
        let mut s = SeedSpec::new(2024, 5).stream();
        let trials = 1_000_000u64;
        let mut counts = vec![0u64; g.n()];
        for _ in 0..trials {
            let start = s.below(g.n());
            let len = law.sample(&mut s);
            counts[walk_endpoint(&g, start, len, &mut s)] += 1;
        }
        let mut outside = 0;
        for (c, &q) in counts.iter().zip(tau.probs()) {
            let sd = (trials as f64 * q * (1.0 - q)).sqrt();
            if (*c as f64 - trials as f64 * q).abs() > 3.0 * sd {
                outside += 1;
            }
        }
        // About 0.27% of vertices are expected outside 3 sigma.
        assert!(outside <= 4, "{outside} vertices outside 3 sigma");
        assert!(chi_square_gof(&counts, tau.probs()).passes(1e-3));
    }
}
