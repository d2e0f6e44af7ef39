use rand::Rng;
use rand_distr::{Distribution, Zeta};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, zeta, CompensatedSum, QuadConfig};

/// Largest gap the samplers emit. Pareto draws beyond this are clamped; no
/// simulation horizon in this crate comes close to it.
pub const MAX_GAP: u64 = 1 << 52;

const PROB_TOL: f64 = 1e-12;

/// Which role a [`Dist`] plays in an environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// Law of the bias `lambda` at a marked site, values in (0, 1).
    UnitInterval,
    /// Law of the gap between marked sites, values in {1, 2, ...}.
    PositiveInteger,
}

/// A one-dimensional law, used either for biases or for gaps.
///
/// `uniform_interval` is continuous for biases and the discrete uniform law
/// on the integers `lo..=hi` for gaps. `pareto_gap` is a gap law only: the
/// sampler is `d = ceil(U^{-1/alpha})`, whose exact tail is
/// `P(d > x) = x^{-alpha}` for integer `x >= 1` (so `d >= 2` always).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Dist {
    Constant { value: f64 },
    TwoPoint { v1: f64, p1: f64, v2: f64 },
    UniformInterval { lo: f64, hi: f64 },
    DiscreteTable { values: Vec<f64>, probs: Vec<f64> },
    ParetoGap { alpha: f64 },
}

impl Dist {
    pub fn constant(value: f64) -> Self {
        Dist::Constant { value }
    }

    pub fn two_point(v1: f64, p1: f64, v2: f64) -> Self {
        Dist::TwoPoint { v1, p1, v2 }
    }

    pub fn table(values: &[f64], probs: &[f64]) -> Self {
        Dist::DiscreteTable { values: values.to_vec(), probs: probs.to_vec() }
    }

    /// Equally likely values.
    pub fn uniform_on(values: &[f64]) -> Self {
        let p = 1.0 / values.len() as f64;
        Dist::DiscreteTable { values: values.to_vec(), probs: vec![p; values.len()] }
    }

    pub fn pareto_gap(alpha: f64) -> Self {
        Dist::ParetoGap { alpha }
    }

    /// Bias law given through `xi = (1 - lambda) / lambda`: `xi1` with
    /// probability `p1`, else `xi2`.
    pub fn xi_two_point(xi1: f64, p1: f64, xi2: f64) -> Self {
        Dist::two_point(lambda_from_xi(xi1), p1, lambda_from_xi(xi2))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Dist::Constant { .. } => "constant",
            Dist::TwoPoint { .. } => "two_point",
            Dist::UniformInterval { .. } => "uniform_interval",
            Dist::DiscreteTable { .. } => "discrete_table",
            Dist::ParetoGap { .. } => "pareto_gap",
        }
    }

    /// Checks the invariants of the law for the given role.
    pub fn validate(&self, support: Support, eps: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("{} law: {msg}", self.kind_name())));
        match self {
            Dist::TwoPoint { p1, .. } if !(0.0..=1.0).contains(p1) => {
                return bad(format!("p1 = {p1} is not a probability"));
            }
            Dist::DiscreteTable { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return bad("values and probs must be nonempty and of equal length".into());
                }
                if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return bad("negative or non-finite probability".into());
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > PROB_TOL {
                    return bad(format!("probabilities sum to {total}"));
                }
            }
            Dist::UniformInterval { lo, hi } if lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less) => {
                return bad(format!("empty interval [{lo}, {hi}]"));
            }
            _ => {}
        }
        match support {
            Support::UnitInterval => {
                if matches!(self, Dist::ParetoGap { .. }) {
                    return bad("pareto_gap is a gap law".into());
                }
                let (lo, hi) = self.support_range();
                if !(lo > 0.0 && hi < 1.0) {
                    return bad(format!("bias support [{lo}, {hi}] must lie inside (0, 1)"));
                }
                if eps > 0.0 && (lo < eps || hi > 1.0 - eps) {
                    return bad(format!("bias support [{lo}, {hi}] violates ellipticity {eps}"));
                }
            }
            Support::PositiveInteger => match self {
                Dist::ParetoGap { alpha } => {
                    if !(alpha.is_finite() && *alpha > 0.0) {
                        return bad(format!("alpha = {alpha} must be positive"));
                    }
                }
                _ => {
                    for (v, _) in self.raw_atoms(Support::PositiveInteger) {
                        if !(v >= 1.0 && v.fract() == 0.0 && v <= MAX_GAP as f64) {
                            return bad(format!("gap value {v} is not a positive integer"));
                        }
                    }
                }
            },
        }
        Ok(())
    }

    /// Smallest and largest support point (as reals).
    pub fn support_range(&self) -> (f64, f64) {
        match self {
            Dist::Constant { value } => (*value, *value),
            Dist::TwoPoint { v1, p1, v2 } => {
                if *p1 >= 1.0 {
                    (*v1, *v1)
                } else if *p1 <= 0.0 {
                    (*v2, *v2)
                } else {
                    (v1.min(*v2), v1.max(*v2))
                }
            }
            Dist::UniformInterval { lo, hi } => (*lo, *hi),
            Dist::DiscreteTable { values, probs } => values
                .iter()
                .zip(probs)
                .filter(|(_, p)| **p > 0.0)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, _)| (lo.min(*v), hi.max(*v))),
            Dist::ParetoGap { .. } => (2.0, f64::INFINITY),
        }
    }

    fn raw_atoms(&self, support: Support) -> Vec<(f64, f64)> {
        match self {
            Dist::Constant { value } => vec![(*value, 1.0)],
            Dist::TwoPoint { v1, p1, v2 } => vec![(*v1, *p1), (*v2, 1.0 - *p1)],
            Dist::DiscreteTable { values, probs } => values.iter().copied().zip(probs.iter().copied()).collect(),
            Dist::UniformInterval { lo, hi } if support == Support::PositiveInteger => {
                let (lo, hi) = (lo.ceil() as u64, hi.floor() as u64);
                let p = 1.0 / (hi - lo + 1) as f64;
                (lo..=hi).map(|k| (k as f64, p)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Atoms with positive probability, or `None` for continuous/infinite laws.
    pub fn atoms(&self, support: Support) -> Option<Vec<(f64, f64)>> {
        match self {
            Dist::ParetoGap { .. } => None,
            Dist::UniformInterval { .. } if support == Support::UnitInterval => None,
            _ => Some(self.raw_atoms(support).into_iter().filter(|(_, p)| *p > 0.0).collect()),
        }
    }

    /// `E f(lambda)` for a bias law: exact over atoms, adaptive quadrature
    /// for the continuous uniform law.
    pub fn expect_lambda<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        match self {
            Dist::UniformInterval { lo, hi } => {
                let q = integrate(&f, *lo, *hi, QuadConfig { abs_tol: 1e-15, rel_tol: 1e-14, max_intervals: 2000 })?;
                Ok(q.value / (hi - lo))
            }
            Dist::ParetoGap { .. } => Err(Error::Config("pareto_gap is not a bias law".into())),
            _ => {
                let atoms = self.atoms(Support::UnitInterval).unwrap_or_default();
                Ok(atoms.iter().map(|(v, p)| p * f(*v)).collect::<CompensatedSum>().value())
            }
        }
    }

    pub fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Dist::Constant { value } => *value,
            Dist::TwoPoint { v1, p1, v2 } => {
                if rng.random::<f64>() < *p1 {
                    *v1
                } else {
                    *v2
                }
            }
            Dist::UniformInterval { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Dist::DiscreteTable { values, probs } => pick(values, probs, rng.random::<f64>()),
            Dist::ParetoGap { .. } => unreachable!("validated as a bias law"),
        }
    }

    pub fn sample_gap<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Dist::ParetoGap { alpha } => {
                // U in (0, 1]; 1 - U from random() in [0, 1) avoids U = 0.
                let u = 1.0 - rng.random::<f64>();
                pareto_ceil(u.powf(-1.0 / alpha))
            }
            Dist::UniformInterval { lo, hi } => rng.random_range(lo.ceil() as u64..=hi.floor() as u64),
            other => other.sample_lambda(rng) as u64,
        }
    }

    /// Draws from the size-biased gap law `k P(d = k) / E d`.
    pub fn sample_size_biased_gap<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        match self {
            Dist::ParetoGap { alpha } => {
                let mean = self.mean();
                if !mean.is_finite() {
                    return Err(Error::UnsupportedRegime(format!(
                        "size biasing pareto_gap({alpha}) requires a finite mean (alpha > 1)"
                    )));
                }
                // Draw the backward recurrence state Y ~ P(d > y) / E d, then d | d > Y.
                if rng.random::<f64>() < 1.0 / mean {
                    return Ok(self.sample_gap(rng));
                }
                let zeta = Zeta::new(*alpha).map_err(|e| Error::Numeric { routine: "zeta sampler", detail: e.to_string() })?;
                let y = zeta.sample(rng).min(MAX_GAP as f64);
                let u = 1.0 - rng.random::<f64>();
                Ok(pareto_ceil(y * u.powf(-1.0 / alpha)))
            }
            _ => {
                let atoms = self.atoms(Support::PositiveInteger).unwrap_or_default();
                let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
                let values: Vec<f64> = atoms.iter().map(|(v, _)| *v).collect();
                let weights: Vec<f64> = atoms.iter().map(|(v, p)| v * p / mean).collect();
                Ok(pick(&values, &weights, rng.random::<f64>()) as u64)
            }
        }
    }
}

fn pareto_ceil(z: f64) -> u64 {
    if z >= MAX_GAP as f64 {
        MAX_GAP
    } else {
        (z.ceil() as u64).max(1)
    }
}

fn pick(values: &[f64], probs: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for (v, p) in values.iter().zip(probs) {
        acc += p;
        if u < acc {
            return *v;
        }
    }
    // u landed in the rounding slack above the last cumulative sum.
    *values
        .iter()
        .zip(probs)
        .rev()
        .find(|(_, p)| **p > 0.0)
        .map(|(v, _)| v)
        .unwrap_or(&values[values.len() - 1])
}

pub fn lambda_from_xi(xi: f64) -> f64 {
    1.0 / (1.0 + xi)
}

pub fn xi_from_lambda(lambda: f64) -> f64 {
    (1.0 - lambda) / lambda
}

/// Moments and tails of a gap law.
///
/// Implemented by [`Dist`]; custom laws (e.g. tails too heavy for the
/// shipped kinds) can implement it to be classified.
pub trait GapLaw {
    /// `P(d > x)`.
    fn survival(&self, x: u64) -> f64;
    /// `E d` (possibly infinite).
    fn mean(&self) -> f64;
    /// `E d^2` (possibly infinite).
    fn second_moment(&self) -> f64;
    /// `E log d` (possibly infinite).
    fn log_mean(&self) -> f64;
    /// Largest support point, if bounded.
    fn max_gap(&self) -> Option<u64>;

    fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.survival(k - 1) - self.survival(k)
        }
    }

    fn variance(&self) -> f64 {
        let m = self.mean();
        let s = self.second_moment();
        if m.is_finite() && s.is_finite() {
            (s - m * m).max(0.0)
        } else {
            f64::INFINITY
        }
    }
}

impl GapLaw for Dist {
    fn survival(&self, x: u64) -> f64 {
        match self {
            Dist::ParetoGap { alpha } => {
                if x == 0 {
                    1.0
                } else {
                    (x as f64).powf(-alpha)
                }
            }
            _ => self
                .atoms(Support::PositiveInteger)
                .unwrap_or_default()
                .iter()
                .filter(|(v, _)| *v > x as f64)
                .map(|(_, p)| p)
                .sum(),
        }
    }

    fn pmf(&self, k: u64) -> f64 {
        match self {
            Dist::ParetoGap { .. } => {
                if k == 0 {
                    0.0
                } else {
                    self.survival(k - 1) - self.survival(k)
                }
            }
            _ => self
                .atoms(Support::PositiveInteger)
                .unwrap_or_default()
                .iter()
                .filter(|(v, _)| *v == k as f64)
                .map(|(_, p)| p)
                .sum(),
        }
    }

    fn mean(&self) -> f64 {
        match self {
            Dist::ParetoGap { alpha } => 1.0 + zeta(*alpha),
            _ => self.atom_moment(|v| v),
        }
    }

    fn second_moment(&self) -> f64 {
        match self {
            // E d^2 = sum_{x >= 0} (2x + 1) P(d > x)
            Dist::ParetoGap { alpha } if *alpha > 2.0 => 1.0 + 2.0 * zeta(alpha - 1.0) + zeta(*alpha),
            Dist::ParetoGap { .. } => f64::INFINITY,
            _ => self.atom_moment(|v| v * v),
        }
    }

    fn log_mean(&self) -> f64 {
        match self {
            Dist::ParetoGap { alpha } => pareto_log_mean(*alpha),
            _ => self.atom_moment(f64::ln),
        }
    }

    fn max_gap(&self) -> Option<u64> {
        match self {
            Dist::ParetoGap { .. } => None,
            _ => Some(self.support_range().1 as u64),
        }
    }
}

impl Dist {
    fn atom_moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms(Support::PositiveInteger)
            .unwrap_or_default()
            .iter()
            .map(|(v, p)| p * f(*v))
            .collect::<CompensatedSum>()
            .value()
    }
}

/// `E log d = sum_{x >= 1} x^{-alpha} log(1 + 1/x)`, head summed exactly and
/// the tail by Euler–Maclaurin on the expansion of `log(1 + 1/x)`.
fn pareto_log_mean(alpha: f64) -> f64 {
    const N: u64 = 20_000;
    let term = |x: f64| x.powf(-alpha) * (1.0 / x).ln_1p();
    let head: CompensatedSum = (1..N).map(|x| term(x as f64)).collect();
    let n = N as f64;
    // int_N^inf x^{-a} (1/x - 1/(2x^2) + 1/(3x^3)) dx, plus the half endpoint.
    let tail = n.powf(-alpha) / alpha - n.powf(-alpha - 1.0) / (2.0 * (alpha + 1.0))
        + n.powf(-alpha - 2.0) / (3.0 * (alpha + 2.0))
        + 0.5 * term(n);
    head.value() + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{rng, Stream};

    #[test]
    fn validates_tables() {
        let d = Dist::table(&[1.0, 3.0], &[0.5, 0.4]);
        assert!(d.validate(Support::PositiveInteger, 0.0).is_err());
        let d = Dist::table(&[1.0, 2.5], &[0.5, 0.5]);
        assert!(d.validate(Support::PositiveInteger, 0.0).is_err());
        let d = Dist::table(&[1.0, 3.0], &[0.5, 0.5]);
        assert!(d.validate(Support::PositiveInteger, 0.0).is_ok());
        assert!(Dist::constant(1.0).validate(Support::UnitInterval, 0.0).is_err());
        assert!(Dist::constant(0.05).validate(Support::UnitInterval, 0.1).is_err());
        assert!(Dist::constant(0.7).validate(Support::UnitInterval, 0.1).is_ok());
        assert!(Dist::pareto_gap(0.5).validate(Support::UnitInterval, 0.0).is_err());
        assert!(Dist::pareto_gap(-1.0).validate(Support::PositiveInteger, 0.0).is_err());
    }

    #[test]
    fn discrete_gap_moments() {
        let d = Dist::uniform_on(&[1.0, 2.0, 3.0]);
        assert!((d.mean() - 2.0).abs() < 1e-15);
        assert!((d.second_moment() - 14.0 / 3.0).abs() < 1e-14);
        assert!((d.survival(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.pmf(2) - 1.0 / 3.0).abs() < 1e-15);
        let u = Dist::UniformInterval { lo: 1.0, hi: 3.0 };
        assert!(u.validate(Support::PositiveInteger, 0.0).is_ok());
        assert!((u.mean() - 2.0).abs() < 1e-15);
        assert!((u.variance() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn pareto_gap_exact_tail_and_moments() {
        let d = Dist::pareto_gap(0.5);
        assert_eq!(d.survival(0), 1.0);
        assert_eq!(d.survival(1), 1.0);
        assert_eq!(d.pmf(1), 0.0);
        assert!((d.survival(4) - 0.5).abs() < 1e-15);
        assert!(d.mean().is_infinite());
        let d3 = Dist::pareto_gap(3.0);
        // brute-force sum of P(d > x)
        let brute: f64 = 1.0 + (1..2_000_000u64).map(|x| (x as f64).powi(-3)).sum::<f64>();
        assert!((d3.mean() - brute).abs() < 1e-9);
        // E log d for alpha = 3 by brute force
        let brute_log: f64 = (1..2_000_000u64).map(|x| (x as f64).powi(-3) * (1.0 / x as f64).ln_1p()).sum();
        assert!((d3.log_mean() - brute_log).abs() < 1e-10);
    }

    #[test]
    fn pareto_sampler_matches_exact_tail() {
        let d = Dist::pareto_gap(0.5);
        let mut r = rng(11, Stream::Aux(0), 0);
        let n = 200_000;
        let mut over4 = 0;
        let mut min = u64::MAX;
        for _ in 0..n {
            let g = d.sample_gap(&mut r);
            min = min.min(g);
            if g > 4 {
                over4 += 1;
            }
        }
        assert!(min >= 2);
        let p = over4 as f64 / n as f64;
        let se = (0.25f64 / n as f64).sqrt();
        assert!((p - 0.5).abs() < 4.0 * se, "P(d > 4) = {p}");
    }

    #[test]
    fn size_biased_table_frequencies() {
        let d = Dist::uniform_on(&[1.0, 2.0, 3.0]);
        let mut r = rng(5, Stream::Aux(1), 0);
        let n = 120_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[d.sample_size_biased_gap(&mut r).unwrap() as usize] += 1;
        }
        for k in 1..=3 {
            let p = k as f64 / 6.0;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let phat = counts[k] as f64 / n as f64;
            assert!((phat - p).abs() < 4.0 * se, "k = {k}: {phat} vs {p}");
        }
    }

    #[test]
    fn size_biased_pareto_mean() {
        // alpha = 3.5: E_Q d = E d^2 / E d is finite and the sampler must match it.
        let d = Dist::pareto_gap(3.5);
        let target = d.second_moment() / d.mean();
        let mut r = rng(9, Stream::Aux(2), 0);
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| d.sample_size_biased_gap(&mut r).unwrap() as f64).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (v / n as f64).sqrt();
        assert!((m - target).abs() < 4.0 * se, "{m} vs {target} (se {se})");
        assert!(Dist::pareto_gap(1.0).sample_size_biased_gap(&mut r).is_err());
    }

    #[test]
    fn uniform_bias_expectation_by_quadrature() {
        let d = Dist::UniformInterval { lo: 0.2, hi: 0.8 };
        // E xi = (ln(hi/lo))/(hi - lo) - 1
        let exact = (0.8f64 / 0.2).ln() / 0.6 - 1.0;
        let got = d.expect_lambda(xi_from_lambda).unwrap();
        assert!((got - exact).abs() < 1e-13);
    }
}
