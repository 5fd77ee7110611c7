//! Small statistics toolkit used by the Monte Carlo checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sample mean; `NaN` for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two samples.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Linear-interpolated quantile of an unsorted sample, `q` in `[0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_sf(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df > 0");
    dist.sf(statistic)
}

/// Outcome of a chi-square test.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson goodness-of-fit of observed counts against expected
/// probabilities. Cells are merged left to right until each pooled cell has
/// an expected count of at least 5; leftover mass joins the last cell.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let total = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &pr) in observed.iter().zip(probs) {
        o += obs as f64;
        e += pr * total;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if o > 0.0 || e > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let statistic = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e) * (o - e) / e } else { 0.0 })
        .sum();
    let df = cells.len().saturating_sub(1);
    ChiSquareTest {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
    }
}

/// Two-sample chi-square test of homogeneity for integer-valued samples.
///
/// Adjacent values are pooled until both samples expect at least 5
/// observations in every cell.
pub fn two_sample_chi_square(a: &[i64], b: &[i64]) -> ChiSquareTest {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let lo = a.iter().chain(b).copied().min().unwrap_or(0);
    let hi = a.iter().chain(b).copied().max().unwrap_or(0);
    let width = (hi - lo + 1) as usize;
    let mut ca = vec![0.0; width];
    let mut cb = vec![0.0; width];
    for &x in a {
        ca[(x - lo) as usize] += 1.0;
    }
    for &x in b {
        cb[(x - lo) as usize] += 1.0;
    }
    let total = na + nb;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut oa, mut ob) = (0.0, 0.0);
    for i in 0..width {
        oa += ca[i];
        ob += cb[i];
        let pooled = oa + ob;
        if pooled * na / total >= 5.0 && pooled * nb / total >= 5.0 {
            cells.push((oa, ob));
            oa = 0.0;
            ob = 0.0;
        }
    }
    if oa + ob > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += oa;
                last.1 += ob;
            }
            None => cells.push((oa, ob)),
        }
    }
    let mut statistic = 0.0;
    for &(oa, ob) in &cells {
        let pooled = oa + ob;
        let ea = pooled * na / total;
        let eb = pooled * nb / total;
        statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    let df = cells.len().saturating_sub(1);
    ChiSquareTest {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
    }
}

/// `(observed - expected) / sigma` for a binomial frequency.
pub fn binomial_z(successes: u64, trials: u64, prob: f64) -> f64 {
    let n = trials as f64;
    let sd = (n * prob * (1.0 - prob)).sqrt();
    if sd == 0.0 {
        return if successes as f64 == n * prob { 0.0 } else { f64::INFINITY };
    }
    (successes as f64 - n * prob) / sd
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let xs = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        assert_eq!(median(&xs), 2.5);
    }

    #[test]
    fn identical_samples_are_homogeneous() {
        let a: Vec<i64> = (0..200).map(|i| i % 7).collect();
        let t = two_sample_chi_square(&a, &a);
        assert!(t.statistic.abs() < 1e-12);
        assert!(t.passes(1e-3));
    }

    #[test]
    fn shifted_samples_are_rejected() {
        let a: Vec<i64> = (0..500).map(|i| i % 10).collect();
        let b: Vec<i64> = (0..500).map(|i| i % 10 + 3).collect();
        assert!(!two_sample_chi_square(&a, &b).passes(1e-3));
    }

    #[test]
    fn gof_exact_counts_pass() {
        let t = chi_square_gof(&[250, 250, 250, 250], &[0.25; 4]);
        assert_eq!(t.df, 3);
        assert!(t.statistic.abs() < 1e-12);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }
}
