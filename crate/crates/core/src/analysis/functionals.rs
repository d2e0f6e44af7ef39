use rayon::prelude::*;
use serde::Serialize;

use super::regime::{classify, Regime};
use super::speed::speed_formula;
use crate::env::{sample_dual, sample_environment, DualMode, EnvironmentSpec, GapLaw, SparseEnvironment};
use crate::error::{Error, Result};
use crate::numerics::CompensatedSum;
use crate::seed::replica_seeds;
use crate::stats::mean_stderr;

/// Truncation control for right-product series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesControl {
    /// Absolute bound on the neglected tail.
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { tol: 1e-10, max_terms: 1_000_000 }
    }
}

/// Sites beyond which the literal site-by-site form is skipped.
const SITE_FORM_LIMIT: i64 = 10_000_000;

/// Bound on the tail of `sum_k P_k L_{k+1}` per unit of the current product.
///
/// With `xi <= xi_max < 1` and gaps `<= d_max` the bound
/// `d_max xi_max / (1 - xi_max)` is certain. Otherwise the conditional mean
/// of the tail, `E d E xi / (1 - E xi)`, is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailModel {
    pub factor: f64,
    pub certified: bool,
}

impl TailModel {
    pub fn for_spec(spec: &EnvironmentSpec) -> Result<Self> {
        let e_xi = spec.expect_xi(|x| x)?;
        if e_xi >= 1.0 {
            return Err(Error::NotSummable(format!("E xi = {e_xi} >= 1: right-product series diverge in mean")));
        }
        let xi_max = spec.xi_max();
        if let (true, Some(d_max)) = (xi_max < 1.0, spec.gap_dist.max_gap()) {
            return Ok(TailModel { factor: d_max as f64 * xi_max / (1.0 - xi_max), certified: true });
        }
        Ok(TailModel { factor: spec.gap_dist.mean() * e_xi / (1.0 - e_xi), certified: false })
    }
}

/// A truncated right-product series with both of its evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    /// Sum over stretches: `(sites before the first mark) + sum_k P_k L_k`.
    pub stretch_form: f64,
    /// Literal sum over sites, when the window is small enough.
    pub site_form: Option<f64>,
    /// Marks included.
    pub terms: usize,
    pub tail_bound: f64,
    pub certified: bool,
}

/// `sum_{n >= from} prod_{j = from}^{n} rho_j`, truncated after the mark at
/// which the tail bound drops below `ctrl.tol`.
pub fn right_product_sum(env: &SparseEnvironment, from: i64, tail: &TailModel, ctrl: &SeriesControl) -> Result<SeriesValue> {
    let first = env.mark_at_or_before(from - 1) + 1;
    let mut k = first;
    let mut sum = CompensatedSum::default();
    sum.add((env.position(first) - from) as f64);
    let mut p = 1.0;
    let mut terms = 0;
    loop {
        let here = env.mark(k);
        p *= here.xi();
        sum.add(p * (env.position(k + 1) - here.position) as f64);
        terms += 1;
        if p * tail.factor < ctrl.tol {
            break;
        }
        if terms >= ctrl.max_terms {
            return Err(Error::NotSummable(format!("tail still {:e} after {terms} marks", p * tail.factor)));
        }
        k += 1;
    }
    let end = env.position(k + 1);
    let site_form = (end - from <= SITE_FORM_LIMIT).then(|| {
        let rho: Vec<f64> = env.omega_table(from, end - 1).into_iter().map(|w| (1.0 - w) / w).collect();
        let mut s = CompensatedSum::default();
        let mut q = 1.0;
        for r in rho {
            q *= r;
            s.add(q);
        }
        s.value()
    });
    Ok(SeriesValue { stretch_form: sum.value(), site_form, terms, tail_bound: p * tail.factor, certified: tail.certified })
}

/// Both forms of `Lambda = (1/omega_0) [1 + sum_{i>=1} prod_{j=1}^i rho_j]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaValue {
    pub value: f64,
    pub site_form: Option<f64>,
    pub stretch_form: f64,
    pub terms: usize,
    pub tail_bound: f64,
    pub certified: bool,
}

/// Relative agreement demanded between the two evaluations of a series.
pub const FORM_AGREEMENT: f64 = 1e-9;

pub fn lambda_functional(env: &SparseEnvironment, ctrl: &SeriesControl) -> Result<LambdaValue> {
    let tail = TailModel::for_spec(env.spec())?;
    lambda_with(env, &tail, ctrl)
}

fn lambda_with(env: &SparseEnvironment, tail: &TailModel, ctrl: &SeriesControl) -> Result<LambdaValue> {
    let w0 = env.omega(0);
    let s = right_product_sum(env, 1, tail, ctrl)?;
    let stretch_form = (1.0 + s.stretch_form) / w0;
    let site_form = s.site_form.map(|x| (1.0 + x) / w0);
    if let Some(site) = site_form {
        if (site - stretch_form).abs() > FORM_AGREEMENT * stretch_form.abs().max(1.0) {
            return Err(Error::Numeric {
                routine: "lambda_functional",
                detail: format!("site form {site} and stretch form {stretch_form} disagree"),
            });
        }
    }
    Ok(LambdaValue { value: stretch_form, site_form, stretch_form, terms: s.terms, tail_bound: s.tail_bound / w0, certified: s.certified })
}

/// `S~ = 1 + 2 sum_{n>=0} prod_{j=0}^n rho~_j`, the right-oriented form of
/// the dual series whose mean is `1 / v`.
pub fn dual_s_tilde(env: &SparseEnvironment, ctrl: &SeriesControl) -> Result<SeriesValue> {
    let tail = TailModel::for_spec(env.spec())?;
    let s = right_product_sum(env, 0, &tail, ctrl)?;
    Ok(SeriesValue {
        stretch_form: 1.0 + 2.0 * s.stretch_form,
        site_form: s.site_form.map(|x| 1.0 + 2.0 * x),
        tail_bound: 2.0 * s.tail_bound,
        ..s
    })
}

/// Truncated two-sided check of an exact series identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / max(1, |lhs|)`.
    pub residual: f64,
}

impl IdentityResidual {
    fn new(lhs: f64, rhs: f64) -> Self {
        IdentityResidual { lhs, rhs, residual: (lhs - rhs).abs() / lhs.abs().max(1.0) }
    }
}

fn require_marked_origin(env: &SparseEnvironment) -> Result<()> {
    if env.origin_marked() {
        Ok(())
    } else {
        Err(Error::Input("series identities are stated for environments with a_0 = 0".into()))
    }
}

/// `S = (a_1 - 1) + sum_{n=1}^{N} xi_1...xi_n d_{n+1}`.
pub fn series_s(env: &SparseEnvironment, n_marks: usize) -> Result<f64> {
    require_marked_origin(env)?;
    let mut s = CompensatedSum::default();
    s.add((env.position(1) - 1) as f64);
    let mut p = 1.0;
    for n in 1..=n_marks as i64 {
        p *= env.xi(n);
        s.add(p * env.gap(n + 1) as f64);
    }
    Ok(s.value())
}

/// `F = sum_{n=0}^{N} xi_0^{-1}...xi_{-n}^{-1} d_{-n}`.
pub fn series_f(env: &SparseEnvironment, n_marks: usize) -> Result<f64> {
    require_marked_origin(env)?;
    let mut s = CompensatedSum::default();
    let mut p = 1.0;
    for n in 0..=n_marks as i64 {
        p /= env.xi(-n);
        s.add(p * env.gap(-n) as f64);
    }
    Ok(s.value())
}

/// Site sum `sum_{k=1}^{a_{N+1}-1} prod_{i=1}^k rho_i` against [`series_s`].
pub fn identity_check_s(env: &SparseEnvironment, n_marks: usize) -> Result<IdentityResidual> {
    let rhs = series_s(env, n_marks)?;
    let end = env.position(n_marks as i64 + 1) - 1;
    let mut lhs = CompensatedSum::default();
    let mut p = 1.0;
    for k in 1..=end {
        p *= env.rho(k);
        lhs.add(p);
    }
    Ok(IdentityResidual::new(lhs.value(), rhs))
}

/// Site sum `sum_{k=0}^{-a_{-N-1}-1} prod_{j=0}^k rho_{-j}^{-1}` against [`series_f`].
pub fn identity_check_f(env: &SparseEnvironment, n_marks: usize) -> Result<IdentityResidual> {
    let rhs = series_f(env, n_marks)?;
    let end = -env.position(-(n_marks as i64) - 1) - 1;
    let mut lhs = CompensatedSum::default();
    let mut p = 1.0;
    for k in 0..=end {
        p /= env.rho(-k);
        lhs.add(p);
    }
    Ok(IdentityResidual::new(lhs.value(), rhs))
}

/// Monte Carlo mean of a functional with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Speed from a mean over dual samples: `v = 1 / mean`, delta-method SE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualSpeedEstimate {
    pub functional: MeanEstimate,
    pub v: f64,
    pub v_stderr: f64,
}

impl DualSpeedEstimate {
    fn from_samples(xs: &[f64]) -> Self {
        let (mean, stderr) = mean_stderr(xs);
        DualSpeedEstimate { functional: MeanEstimate { mean, stderr, n: xs.len() }, v: 1.0 / mean, v_stderr: stderr / (mean * mean) }
    }
}

fn require_right_transient(spec: &EnvironmentSpec) -> Result<()> {
    let r = classify(spec)?;
    if r.classification != Regime::TransientRight {
        return Err(Error::WrongRegime(format!("needs a right-transient spec, got {:?}", r.classification)));
    }
    if !spec.gap_dist.second_moment().is_finite() {
        return Err(Error::InfiniteMoment("E d^2 is infinite".into()));
    }
    Ok(())
}

fn over_dual_samples<F>(spec: &EnvironmentSpec, n: usize, seed: u64, f: F) -> Result<Vec<f64>>
where
    F: Fn(&SparseEnvironment) -> Result<f64> + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let (env, _) = sample_dual(spec, replica_seeds(seed, i).0, 8, DualMode::Direct)?;
            f(&env)
        })
        .collect()
}

/// `v = 1 / E_Q Lambda` with `Lambda` evaluated on dual samples.
pub fn speed_via_dual(spec: &EnvironmentSpec, n_samples: usize, ctrl: &SeriesControl, seed: u64) -> Result<DualSpeedEstimate> {
    require_right_transient(spec)?;
    let tail = TailModel::for_spec(spec)?;
    let xs = over_dual_samples(spec, n_samples, seed, |env| lambda_with(env, &tail, ctrl).map(|l| l.value))?;
    Ok(DualSpeedEstimate::from_samples(&xs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct STildeReport {
    pub estimate: DualSpeedEstimate,
    /// `VAR d / E d + E d E S-bar`.
    pub target: f64,
}

/// Monte Carlo `E_Q S~` against its closed form.
pub fn identity_e_s_tilde(spec: &EnvironmentSpec, n_samples: usize, ctrl: &SeriesControl, seed: u64) -> Result<STildeReport> {
    require_right_transient(spec)?;
    let xs = over_dual_samples(spec, n_samples, seed, |env| dual_s_tilde(env, ctrl).map(|s| s.stretch_form))?;
    let b = speed_formula(spec)?;
    Ok(STildeReport { estimate: DualSpeedEstimate::from_samples(&xs), target: b.var_term + b.s_bar_term })
}

/// `E d / E_P(d_0 Lambda)` with `Lambda` on unshifted P-environments.
///
/// Kept as a diagnostic: it does not reproduce the speed (on
/// `lambda = 2/3, d in {1, 3}` it tends to 1/6, not 2/13).
pub fn speed_reweighted_diagnostic(spec: &EnvironmentSpec, n_samples: usize, ctrl: &SeriesControl, seed: u64) -> Result<DualSpeedEstimate> {
    require_right_transient(spec)?;
    let tail = TailModel::for_spec(spec)?;
    let mean_d = spec.gap_dist.mean();
    let xs: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let env = sample_environment(spec, replica_seeds(seed, i).0, 8)?;
            Ok(env.gap(0) as f64 * lambda_with(&env, &tail, ctrl)?.value / mean_d)
        })
        .collect::<Result<_>>()?;
    Ok(DualSpeedEstimate::from_samples(&xs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{dualize, Dist};

    fn spec(lambda: Dist, gap: Dist) -> EnvironmentSpec {
        EnvironmentSpec::new(lambda, gap).unwrap()
    }

    #[test]
    fn classical_lambda() {
        let env = sample_environment(&spec(Dist::constant(0.7), Dist::constant(1.0)), 0, 4).unwrap();
        let l = lambda_functional(&env, &SeriesControl::default()).unwrap();
        assert!((l.value - 2.5).abs() < 1e-9);
        assert!(l.certified);
    }

    #[test]
    fn fair_lambda_diverges() {
        let env = sample_environment(&spec(Dist::constant(0.5), Dist::constant(2.0)), 0, 4).unwrap();
        assert!(matches!(lambda_functional(&env, &SeriesControl::default()), Err(Error::NotSummable(_))));
    }

    /// Hand expansion on lambda = 2/3, d in {1, 3}: origin marked gives
    /// mean 6; inside a size-biased 3-stretch, M in {1, 2} gives mean 7.
    #[test]
    fn lambda_palm_oracle_conditional_means() {
        let s = spec(Dist::constant(2.0 / 3.0), Dist::uniform_on(&[1.0, 3.0]));
        let ctrl = SeriesControl::default();
        let n = 20_000;
        let (mut marked, mut unmarked) = (Vec::new(), Vec::new());
        for i in 0..n {
            let (env, _) = sample_dual(&s, i, 8, DualMode::Direct).unwrap();
            let l = lambda_functional(&env, &ctrl).unwrap().value;
            if env.origin_marked() { marked.push(l) } else { unmarked.push(l) }
        }
        let (m1, s1) = mean_stderr(&marked);
        let (m2, s2) = mean_stderr(&unmarked);
        assert!((m1 - 6.0).abs() < 4.0 * s1, "{m1} +- {s1}");
        assert!((m2 - 7.0).abs() < 4.0 * s2, "{m2} +- {s2}");
    }

    #[test]
    fn identities_hold_exactly() {
        let specs = [
            spec(Dist::two_point(0.3, 0.5, 0.8), Dist::uniform_on(&[1.0, 2.0, 5.0])),
            spec(Dist::UniformInterval { lo: 0.2, hi: 0.9 }, Dist::pareto_gap(1.5)),
        ];
        for s in &specs {
            for seed in 0..20 {
                let env = sample_environment(s, seed, 8).unwrap();
                assert!(identity_check_s(&env, 30).unwrap().residual < 1e-12);
                assert!(identity_check_f(&env, 30).unwrap().residual < 1e-12);
            }
        }
    }

    #[test]
    fn three_stretch_hand_expansion() {
        // Find an environment with (d_1, d_2, d_3) = (3, 1, 3) on d in {1, 3}.
        let s = spec(Dist::two_point(0.25, 0.5, 0.75), Dist::uniform_on(&[1.0, 3.0]));
        let env = (0..5000)
            .map(|seed| sample_environment(&s, seed, 4).unwrap())
            .find(|e| (e.gap(1), e.gap(2), e.gap(3)) == (3, 1, 3))
            .unwrap();
        let (x1, x2) = (env.xi(1), env.xi(2));
        // Sites 1, 2 before a_1 = 3; then xi_1 on the single site 3; xi_1 xi_2 on sites 4..6.
        let hand = 2.0 + x1 * 1.0 + x1 * x2 * 3.0;
        assert!((series_s(&env, 2).unwrap() - hand).abs() < 1e-14);
        assert!(identity_check_s(&env, 2).unwrap().residual < 1e-15);
    }

    #[test]
    fn classical_s_degenerates() {
        let env = sample_environment(&spec(Dist::two_point(0.6, 0.5, 0.8), Dist::constant(1.0)), 2, 4).unwrap();
        let mut direct = 0.0;
        let mut p = 1.0;
        for k in 1..=9 {
            p *= env.rho(k);
            direct += p;
        }
        assert_eq!(env.position(1) - 1, 0);
        assert!((series_s(&env, 9).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn s_tilde_reduces_classically() {
        let env = sample_environment(&spec(Dist::constant(2.0 / 3.0), Dist::constant(1.0)), 0, 4).unwrap();
        let s = dual_s_tilde(&env, &SeriesControl::default()).unwrap();
        assert!((s.stretch_form - 3.0).abs() < 1e-9);
        // d = m constant, xi = 1/2, origin at offset M: 1 + 2 (M + m) in expectation 3m.
        let env = sample_environment(&spec(Dist::constant(2.0 / 3.0), Dist::constant(4.0)), 0, 4).unwrap();
        let mean: f64 = (0..4).map(|m| dual_s_tilde(&dualize(&env, m as f64 / 4.0).unwrap(), &SeriesControl::default()).unwrap().stretch_form).sum::<f64>() / 4.0;
        assert!((mean - 12.0).abs() < 1e-8);
    }

    #[test]
    fn forms_agree_on_dual_samples() {
        let s = spec(Dist::two_point(0.55, 0.5, 0.9), Dist::uniform_on(&[1.0, 2.0, 4.0]));
        for i in 0..200 {
            let (env, _) = sample_dual(&s, i, 8, DualMode::Direct).unwrap();
            let l = lambda_functional(&env, &SeriesControl::default()).unwrap();
            assert!((l.site_form.unwrap() - l.stretch_form).abs() < 1e-9 * l.value);
            let t = dual_s_tilde(&env, &SeriesControl::default()).unwrap();
            assert!((t.site_form.unwrap() - t.stretch_form).abs() < 1e-9 * t.stretch_form);
        }
    }

    #[test]
    fn reweighted_form_disagrees_as_documented() {
        let s = spec(Dist::constant(2.0 / 3.0), Dist::uniform_on(&[1.0, 3.0]));
        let d = speed_reweighted_diagnostic(&s, 20_000, &SeriesControl::default(), 1).unwrap();
        assert!((d.v - 1.0 / 6.0).abs() < 4.0 * d.v_stderr, "{d:?}");
    }
}
