//! Exact small-instance probabilities and the large-deviation bounds they
//! are checked against.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{ensure, Result};

use super::functions::{upsilon_unchecked, Rates};

/// Thresholds within this distance of an integer count as that integer.
const SNAP: f64 = 1e-9;

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < SNAP {
        r
    } else {
        x
    }
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// `P(G_1 + ... + G_m = k)` for i.i.d. `geo(p)`, the negative binomial pmf.
fn neg_binomial_pmf(m: u32, k: u64, p: f64) -> f64 {
    if k == 0 {
        return p.powi(m as i32);
    }
    if p >= 1.0 {
        return 0.0;
    }
    let (m, k) = (m as f64, k as f64);
    (ln_choose(k + m - 1.0, k) + m * p.ln() + k * (1.0 - p).ln()).exp()
}

fn check_p(p: f64) -> Result<()> {
    ensure(p > 0.0 && p < 1.0, "p", p, "0 < p < 1")
}

/// `P(Y_1 + ... + Y_m = target)` with `Y_i = 1 - geo(p)`.
pub fn y_sum_point_mass(m: u32, target: i64, p: f64) -> Result<f64> {
    check_p(p)?;
    ensure(m > 0, "m", m as f64, "m >= 1")?;
    if target > m as i64 {
        return Ok(0.0);
    }
    Ok(neg_binomial_pmf(m, (m as i64 - target) as u64, p))
}

/// `P(Y_1 + ... + Y_m >= t)`.
pub fn y_sum_tail(m: u32, t: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    let kmax = (m as f64 - snap(t)).floor();
    if kmax < 0.0 {
        return Ok(0.0);
    }
    Ok((0..=kmax as u64).map(|k| neg_binomial_pmf(m, k, p)).sum())
}

/// `P(Yhat_1 + ... + Yhat_m >= t)` where each term is kept with probability
/// 1/2 and zeroed otherwise.
pub fn hat_y_sum_tail(m: u32, t: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    let t = snap(t);
    let mut total = if t <= 0.0 { binom_half(m, 0) } else { 0.0 };
    for k in 1..=m {
        total += binom_half(m, k) * y_sum_tail(k, t, p)?;
    }
    Ok(total)
}

/// `C(m, k) 2^-m`.
fn binom_half(m: u32, k: u32) -> f64 {
    (ln_choose(m as f64, k as f64) - m as f64 * std::f64::consts::LN_2).exp()
}

/// Distribution of `S_k = X_1 + ... + X_k` for `k = 1..=m`, where the
/// partial sums follow `S_1 = 1`, `S_(i+1) = max(S_i + Y_(i+1), 1)`.
///
/// `S_k` lives on `1..=k`, so the DP is exact: from state `s`, the next
/// state is `s + 1 - g` for `g < s` and 1 for `g >= s`, the last with
/// probability `(1-p)^s`.
fn x_sum_laws(m: u32, p: f64) -> Vec<Vec<f64>> {
    let q = 1.0 - p;
    let m = m as usize;
    let mut laws = Vec::with_capacity(m);
    let mut cur = vec![0.0; m + 2];
    cur[1] = 1.0;
    laws.push(cur.clone());
    for _ in 1..m {
        let mut next = vec![0.0; m + 2];
        for (s, &mass) in cur.iter().enumerate().skip(1) {
            if mass == 0.0 {
                continue;
            }
            let mut w = p;
            for g in 0..s {
                next[s + 1 - g] += mass * w;
                w *= q;
            }
            next[1] += mass * q.powi(s as i32);
        }
        laws.push(next.clone());
        cur = next;
    }
    laws
}

fn tail_above(law: &[f64], t: f64) -> f64 {
    law.iter()
        .enumerate()
        .filter(|&(s, _)| s as f64 > t)
        .map(|(_, &w)| w)
        .sum()
}

/// `P(X_1 + ... + X_m > a m)`, exact.
pub fn x_sum_tail(m: u32, a: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    ensure(m > 0, "m", m as f64, "m >= 1")?;
    let laws = x_sum_laws(m, p);
    Ok(tail_above(&laws[m as usize - 1], snap(a * m as f64)))
}

/// `P(Xhat_1 + ... + Xhat_m > a m)` with fair-coin thinning, expanded over
/// the number `k` of kept terms: `sum_k C(m,k) 2^-m P(X_1 + ... + X_k > a m)`.
pub fn hat_x_sum_tail(m: u32, a: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    ensure(m > 0, "m", m as f64, "m >= 1")?;
    let t = snap(a * m as f64);
    let laws = x_sum_laws(m, p);
    let mut total = if t < 0.0 { binom_half(m, 0) } else { 0.0 };
    for k in 1..=m {
        total += binom_half(m, k) * tail_above(&laws[k as usize - 1], t);
    }
    Ok(total)
}

/// `P(E_1 + ... + E_m <= x m)` for unit exponentials, as the Poisson
/// upper tail `P(Poisson(x m) >= m)`, summed term by term.
pub fn erlang_lower_tail(m: u32, x: f64) -> Result<f64> {
    ensure(x > 0.0, "x", x, "x > 0")?;
    let lambda = x * m as f64;
    let ln_term = |k: f64| -lambda + k * lambda.ln() - ln_gamma(k + 1.0);
    let mut total = 0.0;
    let mut k = m as f64;
    loop {
        let term = ln_term(k).exp();
        total += term;
        // Past the mode, terms shrink geometrically.
        if k > lambda && term <= total * 1e-18 {
            break;
        }
        k += 1.0;
    }
    Ok(total.min(1.0))
}

/// `P(Z_1 + ... + Z_m >= kappa m)` for i.i.d. `Z = 1 + geo(p)`.
pub fn geo_plus_one_upper_tail(m: u32, kappa: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    // Z-sum >= kappa m  <=>  geo-sum >= ceil(kappa m) - m.
    let kmin = (snap(kappa * m as f64).ceil() - m as f64).max(0.0) as u64;
    let mut total = 0.0;
    let mut k = kmin;
    loop {
        let term = neg_binomial_pmf(m, k, p);
        total += term;
        let ratio = (k + m as u64) as f64 / (k + 1) as f64 * (1.0 - p);
        if ratio < 1.0 && term <= total * 1e-18 {
            break;
        }
        k += 1;
    }
    Ok(total.min(1.0))
}

/// The two closed-form tail bounds for sums of independent variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChernoffKind {
    /// `P(E_1 + ... + E_m <= x m) <= exp(-Upsilon(x) m)`.
    ExpSum,
    /// `P(Z_1 + ... + Z_m >= kappa m) <= f(2 - kappa)^m` for `kappa >= 1/p`.
    GeoPlusOneSum,
}

/// Bound of the given kind; `p` is ignored for `ExpSum`.
pub fn chernoff_bound(kind: ChernoffKind, m: u32, x_or_kappa: f64, p: f64) -> Result<f64> {
    match kind {
        ChernoffKind::ExpSum => {
            ensure(x_or_kappa > 0.0, "x", x_or_kappa, "x > 0")?;
            Ok((-upsilon_unchecked(x_or_kappa) * m as f64).exp())
        }
        ChernoffKind::GeoPlusOneSum => {
            let rates = Rates::new(p)?;
            ensure(x_or_kappa >= 1.0 / p, "kappa", x_or_kappa, "kappa >= 1/p")?;
            Ok((rates.log_f(2.0 - x_or_kappa) * m as f64).exp())
        }
    }
}

/// `C m^2 h(a)^m`.
pub fn x_sum_bound(m: u32, a: f64, p: f64, c: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&a), "a", a, "0 <= a <= 1")?;
    let m = m as f64;
    Ok(c * m * m * Rates::new(p)?.h(a).powf(m))
}

/// `C' m^3 (2 g_U(a))^-m`.
pub fn hat_x_sum_bound(m: u32, a: f64, p: f64, c: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&a), "a", a, "0 <= a <= 1")?;
    let m = m as f64;
    Ok(c * m.powi(3) * (2.0 * Rates::new(p)?.g_u(a)).powf(-m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Gamma};

    /// Pmf of `Y_1 + ... + Y_m` by direct convolution, geometric support cut
    /// at `cap` failures. Index `i` holds the probability of the value `m - i`.
    fn convolved(m: u32, p: f64, cap: usize) -> Vec<f64> {
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

    /// Lindley recursion by brute force over a truncated geometric.
    fn x_sum_brute(m: u32, p: f64, cap: usize) -> Vec<f64> {
        let mut law = vec![(1i64, 1.0)];
        for _ in 1..m {
            let mut next = std::collections::BTreeMap::new();
            for &(s, w) in &law {
                for g in 0..=cap {
                    let y = 1 - g as i64;
                    // Every g >= s reflects to 1, so the last cell can
                    // carry the whole remaining tail.
                    let pr = if g == cap {
                        (1.0 - p).powi(g as i32)
                    } else {
                        p * (1.0 - p).powi(g as i32)
                    };
                    *next.entry((s + y).max(1)).or_insert(0.0) += w * pr;
                }
            }
            law = next.into_iter().collect();
        }
        let mut out = vec![0.0; m as usize + 2];
        for (s, w) in law {
            out[s as usize] += w;
        }
        out
    }

    #[test]
    fn point_mass_trivial() {
        assert!((y_sum_point_mass(1, 1, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!((y_sum_point_mass(1, 0, 0.3).unwrap() - 0.21).abs() < 1e-15);
        assert_eq!(y_sum_point_mass(3, 4, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn point_mass_matches_convolution() {
        for p in [0.3, 0.5, 0.8] {
            for m in 1..=10u32 {
                let law = convolved(m, p, 200);
                for target in -20..=m as i64 {
                    let want = law[(m as i64 - target) as usize];
                    let got = y_sum_point_mass(m, target, p).unwrap();
                    assert!((got - want).abs() < 1e-12, "p={p} m={m} t={target}");
                }
            }
        }
    }

    #[test]
    fn point_masses_form_a_distribution() {
        for p in [0.2, 0.5, 0.9] {
            for m in [1u32, 5, 20] {
                let total: f64 = (-2000..=m as i64).map(|t| y_sum_point_mass(m, t, p).unwrap()).sum();
                assert!((1.0 - 1e-9..=1.0 + 1e-12).contains(&total), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn x_dp_matches_brute_force() {
        assert_eq!(x_sum_tail(1, 0.5, 0.4).unwrap(), 1.0);
        for p in [0.3, 0.6] {
            for m in 1..=7u32 {
                let exact = x_sum_laws(m, p).pop().unwrap();
                let brute = x_sum_brute(m, p, 60);
                assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for (e, b) in exact.iter().zip(&brute) {
                    assert!((e - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hat_x_brute_force_over_coins() {
        // Enumerate the coin patterns; kept terms follow the reflected walk.
        let (m, p, a) = (6u32, 0.4, 0.3);
        let laws = x_sum_laws(m, p);
        let mut want = 0.0;
        for mask in 0u32..(1 << m) {
            let k = mask.count_ones() as usize;
            let tail = if k == 0 { 0.0 } else { tail_above(&laws[k - 1], a * m as f64) };
            want += tail / (1 << m) as f64;
        }
        assert!((hat_x_sum_tail(m, a, p).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn erlang_matches_gamma_cdf() {
        for m in [1u32, 5, 30] {
            let g = Gamma::new(m as f64, 1.0).unwrap();
            for x in [0.1, 0.5, 0.9, 1.5] {
                let want = g.cdf(x * m as f64);
                let got = erlang_lower_tail(m, x).unwrap();
                assert!((got - want).abs() < 1e-10 * want.max(1e-3), "m={m} x={x}");
            }
        }
    }

    #[test]
    fn geo_tail_matches_complement() {
        for p in [0.3, 0.7] {
            for m in [1u32, 4, 12] {
                for kappa in [1.0 / p, 2.0 / p] {
                    let kmin = ((kappa * m as f64).ceil() - m as f64) as u64;
                    let below: f64 = (0..kmin).map(|k| neg_binomial_pmf(m, k, p)).sum();
                    let got = geo_plus_one_upper_tail(m, kappa, p).unwrap();
                    assert!((got - (1.0 - below)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn exp_bound_trivial_above_one() {
        assert_eq!(chernoff_bound(ChernoffKind::ExpSum, 7, 1.5, 0.0).unwrap(), 1.0);
        assert!(chernoff_bound(ChernoffKind::GeoPlusOneSum, 3, 1.0, 0.5).is_err());
    }
}
