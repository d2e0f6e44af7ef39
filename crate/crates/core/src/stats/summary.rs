use serde::Serialize;

use crate::numerics::CompensatedSum;

/// Streaming mean/variance (Welford) with Chan's pairwise merge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for fewer than two points).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for Welford {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut w = Welford::default();
        for x in iter {
            w.push(x);
        }
        w
    }
}

/// Sample mean and standard error of the mean, from compensated two-pass
/// sums so the result does not depend on the order of `xs` beyond rounding.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().copied().collect::<CompensatedSum>().value() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).collect::<CompensatedSum>().value();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

/// Type-7 (linear interpolation) quantile; `xs` need not be sorted.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn empirical_quantiles(xs: &[f64], qs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    qs.iter().map(|q| quantile_sorted(&v, *q)).collect()
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{rng, Stream};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    #[test]
    fn constant_sample_has_zero_se() {
        let (m, se) = mean_stderr(&[3.5; 100]);
        assert_eq!((m, se), (3.5, 0.0));
    }

    #[test]
    fn balanced_coin() {
        let mut r = rng(1, Stream::Aux(0), 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| if r.random::<bool>() { 1.0 } else { 0.0 }).collect();
        let (m, se) = mean_stderr(&xs);
        assert!((m - 0.5).abs() < 4.0 * se);
    }

    #[test]
    fn quantiles_type7() {
        let xs = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&xs, 0.5), 2.5);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        assert!((quantile(&xs, 0.25) - 1.75).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn merge_order_independent(xs in prop::collection::vec(-1e6f64..1e6, 2..200), seed in any::<u64>(), cut in 0usize..200) {
            let (m1, s1) = mean_stderr(&xs);
            let mut ys = xs.clone();
            ys.shuffle(&mut rng(seed, Stream::Aux(0), 0));
            let (m2, s2) = mean_stderr(&ys);
            prop_assert!((m1 - m2).abs() <= 1e-12 * m1.abs().max(1.0));
            prop_assert!((s1 - s2).abs() <= 1e-12 * s1.max(1.0));
            let cut = cut.min(xs.len());
            let mut a: Welford = xs[..cut].iter().copied().collect();
            let b: Welford = xs[cut..].iter().copied().collect();
            a.merge(&b);
            prop_assert!((a.mean() - m1).abs() <= 1e-9 * m1.abs().max(1.0));
            prop_assert!((a.stderr() - s1).abs() <= 1e-9 * s1.max(1.0));
        }
    }
}
