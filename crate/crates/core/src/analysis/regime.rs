use serde::{Deserialize, Serialize};

use crate::env::{xi_from_lambda, Dist, EnvironmentSpec, GapLaw};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    TransientRight,
    TransientLeft,
    Recurrent,
    RecurrentHeavyGaps,
}

impl Regime {
    pub fn is_recurrent(self) -> bool {
        matches!(self, Regime::Recurrent | Regime::RecurrentHeavyGaps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub e_log_xi: f64,
    pub e_abs_log_xi: f64,
    pub e_log_d: f64,
    pub classification: Regime,
}

/// Relative tolerance under which `E log xi` counts as zero.
const ZERO_TOL: f64 = 1e-12;

/// Regime of a spec from the sign of `E log xi` and finiteness of `E log d`.
pub fn classify(spec: &EnvironmentSpec) -> Result<RegimeReport> {
    classify_laws(&spec.lambda_dist, &spec.gap_dist)
}

/// As [`classify`] for an arbitrary gap law.
pub fn classify_laws<G: GapLaw + ?Sized>(lambda: &Dist, gap: &G) -> Result<RegimeReport> {
    let e_log_xi = lambda.expect_lambda(|l| xi_from_lambda(l).ln())?;
    let e_abs_log_xi = lambda.expect_lambda(|l| xi_from_lambda(l).ln().abs())?;
    if !e_log_xi.is_finite() || !e_abs_log_xi.is_finite() {
        return Err(Error::UnsupportedRegime("E |log xi| is not finite".into()));
    }
    let e_log_d = gap.log_mean();
    let classification = if !e_log_d.is_finite() {
        Regime::RecurrentHeavyGaps
    } else if e_log_xi.abs() <= ZERO_TOL * e_abs_log_xi.max(1.0) {
        Regime::Recurrent
    } else if e_log_xi < 0.0 {
        Regime::TransientRight
    } else {
        Regime::TransientLeft
    };
    Ok(RegimeReport { e_log_xi, e_abs_log_xi, e_log_d, classification })
}
