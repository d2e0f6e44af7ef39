use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, CompensatedSum, QuadConfig};

/// Stable law with `log phi(t) = -b |t|^kappa (1 + i sign(t) f_kappa(t))`,
/// `f_kappa = -tan(pi kappa / 2)` for `kappa != 1` and `(2/pi) log|t|` at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableLaw {
    pub kappa: f64,
    pub b: f64,
}

impl StableLaw {
    pub fn new(kappa: f64, b: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 2.0) || !(b > 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!("stable law needs kappa in (0, 2] and b > 0, got ({kappa}, {b})")));
        }
        Ok(StableLaw { kappa, b })
    }

    fn skew(&self, t: f64) -> f64 {
        if self.kappa == 1.0 {
            2.0 / PI * t.abs().ln()
        } else {
            -(PI * self.kappa / 2.0).tan()
        }
    }
}

pub fn stable_cf(law: &StableLaw, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let a = law.b * t.abs().powf(law.kappa);
    (Complex64::new(-a, -a * t.signum() * law.skew(t))).exp()
}

/// Numerical settings for [`stable_cdf`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableQuadrature {
    /// Absolute error target for the whole inversion integral.
    pub abs_tol: f64,
    /// Tail of `|phi|` neglected beyond the cutoff.
    pub tail_tol: f64,
    pub max_panels: usize,
}

impl Default for StableQuadrature {
    fn default() -> Self {
        StableQuadrature { abs_tol: 1e-10, tail_tol: 1e-15, max_panels: 200_000 }
    }
}

/// CDF by Gil-Pelaez inversion,
/// `F(x) = 1/2 + (1/pi) int_0^inf e^{-b t^k} sin(t x + b f(t) t^k) / t dt`.
///
/// For `kappa < 1` the integral is taken in `s = t^kappa`, which removes
/// the `t^{kappa-1}` endpoint singularity. The range is cut where
/// `e^{-b s} / (kappa b s)` (a bound on the rest) falls below `tail_tol`,
/// and split into panels over which the phase advances by about `pi`.
pub fn stable_cdf(law: &StableLaw, x: f64, cfg: &StableQuadrature) -> Result<f64> {
    let (k, b) = (law.kappa, law.b);
    let mut s_max = 1.0 / b;
    while (-b * s_max).exp() / (k * b * s_max) > cfg.tail_tol {
        s_max *= 1.25;
    }
    let use_s = k < 1.0;
    let v_max = if use_s { s_max } else { s_max.powf(1.0 / k) };
    // Integrand and phase in the integration variable v.
    let phase = |v: f64| {
        let t = if use_s { v.powf(1.0 / k) } else { v };
        t * x + b * law.skew(t) * t.powf(k)
    };
    let integrand = |v: f64| {
        if v == 0.0 {
            return limit_at_zero(law, x, use_s);
        }
        if use_s {
            (-b * v).exp() * phase(v).sin() / (k * v)
        } else {
            (-b * v.powf(k)).exp() * phase(v).sin() / v
        }
    };
    // Total phase variation from a coarse scan.
    let probes = 4096;
    let mut variation = 0.0;
    let mut prev = phase(0.0);
    for i in 1..=probes {
        let p = phase(v_max * i as f64 / probes as f64);
        variation += (p - prev).abs();
        prev = p;
    }
    let panels = ((variation / PI).ceil() as usize).max(8);
    if panels > cfg.max_panels {
        return Err(Error::Numeric {
            routine: "stable_cdf",
            detail: format!("x = {x} needs {panels} panels (cap {}); argument too far in the tail", cfg.max_panels),
        });
    }
    let h = v_max / panels as f64;
    let qc = QuadConfig { abs_tol: cfg.abs_tol / panels as f64, rel_tol: 1e-13, max_intervals: 400 };
    let mut total = CompensatedSum::default();
    for i in 0..panels {
        total.add(integrate(integrand, i as f64 * h, (i + 1) as f64 * h, qc)?.value);
    }
    Ok((0.5 + total.value() / PI).clamp(0.0, 1.0))
}

fn limit_at_zero(law: &StableLaw, x: f64, use_s: bool) -> f64 {
    let (k, b) = (law.kappa, law.b);
    if use_s {
        // sin(x s^{1/k} + b f s) / (k s) -> b f / k.
        b * law.skew(1.0) / k
    } else if k == 1.0 {
        // Logarithmic singularity; the quadrature never samples an endpoint.
        0.0
    } else if k > 1.0 {
        x
    } else {
        x + b * law.skew(1.0)
    }
}
