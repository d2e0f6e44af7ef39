use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::TestResult;
use crate::error::{Error, Result};

const MIN_EXPECTED: f64 = 5.0;

fn chi2_sf(stat: f64, df: usize) -> Result<f64> {
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Numeric { routine: "chi-square", detail: e.to_string() })?;
    Ok(dist.sf(stat).clamp(0.0, 1.0))
}

/// Pearson goodness of fit of `observed` counts to `probs`. Adjacent bins
/// are pooled left to right until each pooled bin expects at least 5.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<TestResult> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::Input("observed and probs must have equal nonzero length".into()));
    }
    let n: u64 = observed.iter().sum();
    let total_p: f64 = probs.iter().sum();
    if (total_p - 1.0).abs() > 1e-9 {
        return Err(Error::Input(format!("cell probabilities sum to {total_p}")));
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (c, p) in observed.iter().zip(probs) {
        if *p == 0.0 && *c > 0 {
            return Err(Error::Input("count in a cell of probability zero".into()));
        }
        o += *c as f64;
        e += p * n as f64;
        if e >= MIN_EXPECTED {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    if bins.len() < 2 {
        return Err(Error::Input("fewer than two bins after pooling".into()));
    }
    let stat: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    Ok(TestResult { test: "chi_square_gof", statistic: stat, p_value: chi2_sf(stat, bins.len() - 1)?, sizes: vec![n as usize] })
}

/// Pearson homogeneity test of two count vectors over the same cells.
/// Cells empty in both samples are dropped.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::Input("count vectors differ in length".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let n = na + nb;
    let mut stat = 0.0;
    let mut cells = 0;
    for (x, y) in a.iter().zip(b) {
        let col = (*x + *y) as f64;
        if col == 0.0 {
            continue;
        }
        cells += 1;
        let (ea, eb) = (na * col / n, nb * col / n);
        stat += (*x as f64 - ea).powi(2) / ea + (*y as f64 - eb).powi(2) / eb;
    }
    if cells < 2 {
        return Err(Error::Input("fewer than two nonempty cells".into()));
    }
    Ok(TestResult {
        test: "chi_square_homogeneity",
        statistic: stat,
        p_value: chi2_sf(stat, cells - 1)?,
        sizes: vec![na as usize, nb as usize],
    })
}
