use rand::Rng;
use serde::Serialize;

use super::quantile;
use crate::error::{Error, Result};
use crate::seed::{rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
    /// Two-sided coverage of the percentile interval.
    pub level: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { resamples: 1000, seed: 0, level: 0.95 }
    }
}

/// Least-squares fit of `log y = intercept + slope log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
}

fn distinct(xs: &[f64]) -> usize {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Ordinary least squares on `(x, y)`. Requires two distinct abscissae.
pub fn ols(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn log_pairs(pairs: &[(f64, f64)]) -> Result<(Vec<f64>, Vec<f64>)> {
    if pairs.iter().any(|(n, y)| !(*n > 0.0 && *y > 0.0)) {
        return Err(Error::Input("scaling regression needs positive n and statistic".into()));
    }
    Ok(pairs.iter().map(|(n, y)| (n.ln(), y.ln())).unzip())
}

fn percentile_ci(mut slopes: Vec<f64>, level: f64) -> (f64, f64) {
    slopes.sort_by(f64::total_cmp);
    let a = (1.0 - level) / 2.0;
    (super::quantile_sorted(&slopes, a), super::quantile_sorted(&slopes, 1.0 - a))
}

/// Slope of `log statistic` against `log n`, with a pairs-bootstrap CI.
pub fn scaling_regression(pairs: &[(f64, f64)], cfg: &BootstrapConfig) -> Result<ScalingFit> {
    let (lx, ly) = log_pairs(pairs)?;
    if distinct(&lx) < 3 {
        return Err(Error::Input("scaling regression needs at least 3 distinct n".into()));
    }
    let (slope, intercept) = ols(&lx, &ly).expect("distinct abscissae");
    let mut r = rng(cfg.seed, Stream::Bootstrap, 0);
    let mut slopes = Vec::with_capacity(cfg.resamples);
    let m = lx.len();
    while slopes.len() < cfg.resamples {
        let idx: Vec<usize> = (0..m).map(|_| r.random_range(0..m)).collect();
        let bx: Vec<f64> = idx.iter().map(|&i| lx[i]).collect();
        let by: Vec<f64> = idx.iter().map(|&i| ly[i]).collect();
        if let Some((s, _)) = ols(&bx, &by) {
            slopes.push(s);
        }
    }
    let (ci_low, ci_high) = percentile_ci(slopes, cfg.level);
    Ok(ScalingFit { slope, intercept, ci_low, ci_high, points: m })
}

/// Slope of `log median(sample)` against `log n` for grouped samples. The
/// bootstrap resamples within each group and recomputes the medians.
pub fn median_scaling_regression(groups: &[(f64, Vec<f64>)], cfg: &BootstrapConfig) -> Result<ScalingFit> {
    if groups.iter().any(|(_, v)| v.is_empty()) {
        return Err(Error::Input("empty sample group".into()));
    }
    let point: Vec<(f64, f64)> = groups.iter().map(|(n, v)| (*n, quantile(v, 0.5))).collect();
    let (lx, ly) = log_pairs(&point)?;
    if distinct(&lx) < 3 {
        return Err(Error::Input("scaling regression needs at least 3 distinct n".into()));
    }
    let (slope, intercept) = ols(&lx, &ly).expect("distinct abscissae");
    let mut r = rng(cfg.seed, Stream::Bootstrap, 1);
    let mut slopes = Vec::with_capacity(cfg.resamples);
    for _ in 0..cfg.resamples {
        let ys: Vec<f64> = groups
            .iter()
            .map(|(_, v)| {
                let b: Vec<f64> = (0..v.len()).map(|_| v[r.random_range(0..v.len())]).collect();
                quantile(&b, 0.5).max(f64::MIN_POSITIVE).ln()
            })
            .collect();
        slopes.push(ols(&lx, &ys).expect("distinct abscissae").0);
    }
    let (ci_low, ci_high) = percentile_ci(slopes, cfg.level);
    Ok(ScalingFit { slope, intercept, ci_low, ci_high, points: groups.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|n: &f64| (*n, n * n)).collect();
        let fit = scaling_regression(&pairs, &BootstrapConfig::default()).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.ci_low <= fit.slope + 1e-12 && fit.ci_high >= fit.slope - 1e-12);
    }

    #[test]
    fn degenerate_abscissae() {
        let pairs = [(10.0, 1.0), (10.0, 2.0), (20.0, 3.0)];
        assert!(scaling_regression(&pairs, &BootstrapConfig::default()).is_err());
        assert!(scaling_regression(&[(1.0, -1.0), (2.0, 1.0), (3.0, 1.0)], &BootstrapConfig::default()).is_err());
    }

    #[test]
    fn grouped_medians() {
        let groups: Vec<(f64, Vec<f64>)> =
            [100.0f64, 200.0, 400.0].iter().map(|n| (*n, (1..=21).map(|i| n.powf(1.5) * i as f64).collect())).collect();
        let fit = median_scaling_regression(&groups, &BootstrapConfig { resamples: 200, ..Default::default() }).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12);
        assert!(fit.ci_low < 1.5 && fit.ci_high > 1.5);
    }
}
