use serde::Serialize;

use super::regime::{classify, Regime};
use crate::env::{EnvironmentSpec, GapLaw};
use crate::error::{Error, Result};

/// `E S-bar = (1 + E xi) / (1 - E xi)`, infinite when `E xi >= 1`.
pub fn mean_s_bar(spec: &EnvironmentSpec) -> Result<f64> {
    let m = spec.expect_xi(|x| x)?;
    Ok(geometric_ratio(m))
}

/// `E F-bar`, the mirror image with `E (1/xi)`.
pub fn mean_f_bar(spec: &EnvironmentSpec) -> Result<f64> {
    let m = spec.expect_xi(|x| 1.0 / x)?;
    Ok(geometric_ratio(m))
}

fn geometric_ratio(m: f64) -> f64 {
    if m < 1.0 {
        (1.0 + m) / (1.0 - m)
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedBreakdown {
    pub regime: Regime,
    /// `VAR d / E d`.
    pub var_term: f64,
    /// `E S-bar * E d` (or `E F-bar * E d` when transient to the left).
    pub s_bar_term: f64,
    pub v: f64,
}

/// Closed-form asymptotic speed for i.i.d. pairs with `lambda` independent of `d`.
pub fn speed_formula(spec: &EnvironmentSpec) -> Result<SpeedBreakdown> {
    let regime = classify(spec)?.classification;
    let mean_d = spec.gap_dist.mean();
    let var_term = spec.gap_dist.variance() / mean_d;
    let (s_bar, sign) = match regime {
        Regime::TransientRight => (mean_s_bar(spec)?, 1.0),
        Regime::TransientLeft => (mean_f_bar(spec)?, -1.0),
        _ => return Ok(SpeedBreakdown { regime, var_term, s_bar_term: f64::INFINITY, v: 0.0 }),
    };
    let s_bar_term = s_bar * mean_d;
    let inv = var_term + s_bar_term;
    let v = if inv.is_finite() { sign / inv } else { 0.0 };
    Ok(SpeedBreakdown { regime, var_term, s_bar_term, v })
}

/// Largest speed over laws with `E d = mu` and `1 / E S-bar = nu`: `nu / mu`.
pub fn max_speed_fixed_s_bar(mu: f64, nu: f64) -> Result<f64> {
    if !(mu > 0.0 && nu >= 0.0) {
        return Err(Error::Domain(format!("need mu > 0 and nu >= 0, got ({mu}, {nu})")));
    }
    Ok(nu / mu)
}

/// Largest speed over laws with `E d = mu` and `E log xi = b`:
/// `(1 / mu) (1 - e^b) / (1 + e^b)`.
pub fn max_speed_fixed_b(mu: f64, b: f64) -> Result<f64> {
    if !(mu > 0.0 && b < 0.0) {
        return Err(Error::Domain(format!("need mu > 0 and b < 0, got ({mu}, {b})")));
    }
    let e = b.exp();
    Ok((1.0 - e) / (1.0 + e) / mu)
}

/// `(E_Q d_0, E_Q a~_0) = (E d^2 / E d, (E_Q d_0 - 1) / 2)`.
pub fn dual_gap_moments<G: GapLaw + ?Sized>(gap: &G) -> Result<(f64, f64)> {
    let s = gap.second_moment();
    if !s.is_finite() {
        return Err(Error::InfiniteMoment("E d^2 is infinite".into()));
    }
    let eq = s / gap.mean();
    Ok((eq, (eq - 1.0) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Dist;

    fn spec(lambda: Dist, gap: Dist) -> EnvironmentSpec {
        EnvironmentSpec::new(lambda, gap).unwrap()
    }

    #[test]
    fn s_bar_values() {
        assert!((mean_s_bar(&spec(Dist::constant(2.0 / 3.0), Dist::constant(1.0))).unwrap() - 3.0).abs() < 1e-14);
        let heavy = spec(Dist::xi_two_point(4.0, 1.0 / 3.0, 0.25), Dist::constant(1.0));
        assert!(mean_s_bar(&heavy).unwrap().is_infinite());
        assert!(mean_f_bar(&heavy).unwrap().is_infinite());
    }

    #[test]
    fn speed_examples() {
        let s = speed_formula(&spec(Dist::constant(2.0 / 3.0), Dist::uniform_on(&[1.0, 3.0]))).unwrap();
        assert!((s.var_term - 0.5).abs() < 1e-14 && (s.s_bar_term - 6.0).abs() < 1e-13);
        assert!((s.v - 2.0 / 13.0).abs() < 1e-14);
        let c = speed_formula(&spec(Dist::constant(0.7), Dist::constant(1.0))).unwrap();
        assert!((c.v - 0.4).abs() < 1e-14);
        let two = speed_formula(&spec(Dist::constant(2.0 / 3.0), Dist::constant(2.0))).unwrap();
        assert!((two.v - 1.0 / 6.0).abs() < 1e-14);
        assert_eq!(two.var_term, 0.0);
        let left = speed_formula(&spec(Dist::constant(0.3), Dist::constant(1.0))).unwrap();
        assert!((left.v + 0.4).abs() < 1e-14);
        let rec = speed_formula(&spec(Dist::xi_two_point(2.0, 0.5, 0.5), Dist::constant(1.0))).unwrap();
        assert_eq!(rec.v, 0.0);
        // Transient with E xi >= 1: zero speed.
        let slow = speed_formula(&spec(Dist::xi_two_point(4.0, 1.0 / 3.0, 0.25), Dist::constant(1.0))).unwrap();
        assert_eq!((slow.regime, slow.v), (Regime::TransientRight, 0.0));
    }

    #[test]
    fn bounds() {
        assert!((max_speed_fixed_s_bar(2.0, 1.0 / 3.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((max_speed_fixed_b(1.0, (3.0f64 / 7.0).ln()).unwrap() - 0.4).abs() < 1e-15);
        assert!(max_speed_fixed_b(1.0, -1e-12).unwrap() < 1e-11);
        assert!(max_speed_fixed_b(1.0, 0.0).is_err());
        assert!(max_speed_fixed_s_bar(0.0, 0.5).is_err());
    }

    #[test]
    fn dual_moments() {
        let (a, b) = dual_gap_moments(&Dist::constant(4.0)).unwrap();
        assert_eq!((a, b), (4.0, 1.5));
        let (a, b) = dual_gap_moments(&Dist::uniform_on(&[1.0, 2.0, 3.0])).unwrap();
        assert!((a - 7.0 / 3.0).abs() < 1e-14 && (b - 2.0 / 3.0).abs() < 1e-14);
        let (a, b) = dual_gap_moments(&Dist::uniform_on(&[1.0, 3.0])).unwrap();
        assert!((a - 2.5).abs() < 1e-14 && (b - 0.75).abs() < 1e-14);
        assert!(dual_gap_moments(&Dist::pareto_gap(1.5)).is_err());
    }
}
