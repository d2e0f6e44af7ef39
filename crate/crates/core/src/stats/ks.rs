use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of a hypothesis test. `passes(alpha)` is the verdict: the null
/// is kept when `p_value > alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub test: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub sizes: Vec<usize>,
}

impl TestResult {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

const MIN_N: usize = 20;

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form converges fast for small arguments.
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=6).map(|k| ((2 * k - 1) as f64).powi(2) * c).map(f64::exp).sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=20)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Asymptotic p-value with Stephens' finite-size correction.
fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

fn sorted_finite(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("sample contains non-finite values".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Kolmogorov–Smirnov distance of `sample` from the continuous `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<TestResult> {
    if sample.len() < MIN_N {
        return Err(Error::Input(format!("KS test needs n >= {MIN_N}, got {}", sample.len())));
    }
    let v = sorted_finite(sample)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut prev = f64::NEG_INFINITY;
    for (i, x) in v.iter().enumerate() {
        let f = cdf(*x);
        if !(-1e-12..=1.0 + 1e-12).contains(&f) || f < prev - 1e-12 {
            return Err(Error::Input(format!("cdf is not a monotone probability on the sample (F({x}) = {f})")));
        }
        prev = f;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(TestResult { test: "ks_one_sample", statistic: d, p_value: ks_p_value(d, n), sizes: vec![v.len()] })
}

/// Two-sample Kolmogorov–Smirnov test; effective size `nm / (n + m)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() < MIN_N || b.len() < MIN_N {
        return Err(Error::Input(format!("KS test needs n, m >= {MIN_N}, got {} and {}", a.len(), b.len())));
    }
    let (a, b) = (sorted_finite(a)?, sorted_finite(b)?);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let n_eff = n * m / (n + m);
    Ok(TestResult { test: "ks_two_sample", statistic: d, p_value: ks_p_value(d, n_eff), sizes: vec![a.len(), b.len()] })
}
