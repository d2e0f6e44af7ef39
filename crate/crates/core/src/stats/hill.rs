use crate::error::{Error, Result};

/// Hill estimate of the tail index from the `k_top` largest values:
/// `1 / mean(log(x_(i) / x_(k_top + 1)))`.
pub fn hill_estimator(sample: &[f64], k_top: usize) -> Result<f64> {
    if sample.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::Input("Hill estimator needs positive finite values".into()));
    }
    if k_top == 0 || 2 * k_top >= sample.len() {
        return Err(Error::Input(format!("k_top = {k_top} must lie in [1, n/2) for n = {}", sample.len())));
    }
    let mut v = sample.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let threshold = v[k_top].ln();
    let mean = v[..k_top].iter().map(|x| x.ln() - threshold).sum::<f64>() / k_top as f64;
    if mean <= 0.0 {
        return Err(Error::Input("top order statistics are tied".into()));
    }
    Ok(1.0 / mean)
}
