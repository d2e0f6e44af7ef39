use serde::{Deserialize, Serialize};

use crate::env::{Dist, SparseEnvironment};
use crate::error::{Error, Result};

/// Spatial scale `u(x)` of the recurrent walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scale {
    /// `u(x) = x^{2/alpha}` for infinite-mean gaps with tail index `alpha`.
    Power { alpha: f64 },
    /// `u(x) = x^2`, the finite-mean-gap case.
    Classical,
}

impl Scale {
    pub fn for_gap(gap: &Dist) -> Result<Self> {
        match *gap {
            Dist::ParetoGap { alpha } if alpha < 1.0 => Ok(Scale::Power { alpha }),
            _ => Ok(Scale::Classical),
        }
    }

    pub fn u(&self, x: f64) -> Result<f64> {
        match *self {
            Scale::Power { alpha } => u_scale(alpha, x),
            Scale::Classical if x > 0.0 => Ok(x * x),
            Scale::Classical => Err(Error::Domain(format!("u(x) needs x > 0, got {x}"))),
        }
    }
}

/// `u(x) = x^{2/alpha}`.
pub fn u_scale(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("u_scale needs alpha in (0, 1), got {alpha}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("u_scale needs x > 0, got {x}")));
    }
    Ok(x.powf(2.0 / alpha))
}

/// Potential `R(floor(u |t|) sign t) / log n` sampled at increasing `t`.
///
/// Samples at `t < 0` hold the value on the far side (more negative `t`)
/// of the sample point; samples at `t > 0` hold the value on the far side
/// as well. The zero sample is the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialPath {
    pub n: u64,
    pub scale_u: f64,
    pub samples: Vec<(f64, f64)>,
}

impl PotentialPath {
    pub fn from_samples(n: u64, scale_u: f64, samples: Vec<(f64, f64)>) -> Self {
        PotentialPath { n, scale_u, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of the sample closest to `t = 0`, leftmost on ties.
    pub fn origin_index(&self) -> usize {
        let mut best = 0;
        for (i, &(t, _)) in self.samples.iter().enumerate() {
            if t.abs() < self.samples[best].0.abs() {
                best = i;
            }
        }
        best
    }

    pub fn t_range(&self) -> (f64, f64) {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => (a.0, b.0),
            _ => (0.0, 0.0),
        }
    }
}

fn check_horizon(n: u64) -> Result<f64> {
    if n < 100 {
        return Err(Error::Config(format!("potential path needs n >= 100, got {n}")));
    }
    Ok((n as f64).ln())
}

/// Every jump of the normalized potential in `[-t_max, t_max]`, plus the
/// origin, as `(t, value)`; the path is constant between samples.
pub fn potential_breakpoints(env: &SparseEnvironment, n: u64, scale: Scale, t_max: f64) -> Result<PotentialPath> {
    let log_n = check_horizon(n)?;
    let u = scale.u(log_n)?;
    let reach = (u * t_max).floor() as i64;
    let mut right = Vec::new();
    let mut level = 0.0;
    env.for_marks_in(1, reach, |m| {
        level += m.xi().ln();
        right.push((m.position as f64 / u, level / log_n));
    });
    // Site s <= 0 enters R(-m) once m >= 1 - s.
    let mut left = Vec::new();
    level = 0.0;
    let mut marks = env.marks_in(1 - reach, 0);
    marks.reverse();
    for m in marks {
        level -= m.xi().ln();
        left.push((-((1 - m.position) as f64) / u, level / log_n));
    }
    left.reverse();
    let mut samples = left;
    samples.push((0.0, 0.0));
    samples.extend(right);
    Ok(PotentialPath { n, scale_u: u, samples })
}

/// `R_hat_n` on the grid `t_max * i / grid`, `i = -grid..=grid`.
pub fn normalized_potential(env: &SparseEnvironment, n: u64, scale: Scale, t_max: f64, grid: usize) -> Result<PotentialPath> {
    if grid == 0 || t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::Config("normalized_potential needs grid >= 1 and t_max > 0".into()));
    }
    let exact = potential_breakpoints(env, n, scale, t_max)?;
    let o = exact.origin_index();
    let (neg, pos) = (&exact.samples[..o], &exact.samples[o + 1..]);
    let samples = (-(grid as i64)..=grid as i64)
        .map(|i| {
            let t = t_max * i as f64 / grid as f64;
            let v = if t > 0.0 {
                // Last jump at or before t.
                let j = pos.partition_point(|s| s.0 <= t);
                if j == 0 { 0.0 } else { pos[j - 1].1 }
            } else if t < 0.0 {
                let j = neg.partition_point(|s| s.0 < t);
                if j == neg.len() { 0.0 } else { neg[j].1 }
            } else {
                0.0
            };
            (t, v)
        })
        .collect();
    Ok(PotentialPath { n, scale_u: exact.scale_u, samples })
}
