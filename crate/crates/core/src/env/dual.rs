use rand::Rng;
use serde::Serialize;

use super::{EnvironmentSpec, GapLaw, SparseEnvironment};
use crate::error::{Error, Result};
use crate::seed::{rng, zigzag, Stream};

/// How a dual sample is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMode {
    /// Size-biased `d_0`; weight 1.
    Direct,
    /// `d_0` from P, weighted by `d_0 / E d`.
    Importance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualSampleWeight {
    pub weight: f64,
}

/// Shifts every mark of a P-law environment right by `floor(u * d_0)`.
pub fn dualize(env: &SparseEnvironment, u: f64) -> Result<SparseEnvironment> {
    if !env.origin_marked() {
        return Err(Error::Input("dualize expects a P-law environment (origin marked)".into()));
    }
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!("shift fraction u = {u} must lie in [0, 1)")));
    }
    let d0 = env.gap(0);
    let m = ((u * d0 as f64).floor() as i64).min(d0 as i64 - 1);
    Ok(env.shifted(m))
}

/// Draws an environment from the dual law Q.
///
/// Marks other than 0 come from the same per-index streams as
/// [`super::sample_environment`] with that seed.
pub fn sample_dual(
    spec: &EnvironmentSpec,
    seed: u64,
    half_window: usize,
    mode: DualMode,
) -> Result<(SparseEnvironment, DualSampleWeight)> {
    spec.validate()?;
    let mean = spec.gap_dist.mean();
    if !mean.is_finite() {
        return Err(Error::UnsupportedRegime(format!(
            "dual sampling needs E d < infinity; {} law has infinite mean",
            spec.gap_dist.kind_name()
        )));
    }
    let mut r = rng(seed, Stream::EnvPair, zigzag(0));
    let lambda0 = spec.lambda_dist.sample_lambda(&mut r);
    let (d0, weight) = match mode {
        DualMode::Direct => (spec.gap_dist.sample_size_biased_gap(&mut r)?, 1.0),
        DualMode::Importance => {
            let d = spec.gap_dist.sample_gap(&mut r);
            (d, d as f64 / mean)
        }
    };
    let u: f64 = rng(seed, Stream::DualShift, 0).random();
    let m = ((u * d0 as f64).floor() as i64).min(d0 as i64 - 1);
    let env = SparseEnvironment::build(spec.clone(), seed, lambda0, d0, m, half_window);
    Ok((env, DualSampleWeight { weight }))
}

/// One entry of the gap chain kernel together with the invariant mass at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapKernel {
    pub transition: f64,
    pub invariant_mass: f64,
}

/// `H(x, y)` of the chain `Y_n = n - (last mark <= n)` along the dual
/// environment, and `Q(Y_0 = x) = P(d > x) / E d`.
pub fn dual_gap_kernel<G: GapLaw + ?Sized>(gap: &G, x: u64, y: u64) -> Result<GapKernel> {
    let tail = gap.survival(x);
    if tail <= 0.0 {
        return Err(Error::Domain(format!("P(d > {x}) = 0: state {x} is outside the gap chain")));
    }
    let transition = if y == x + 1 {
        gap.survival(x + 1) / tail
    } else if y == 0 {
        gap.pmf(x + 1) / tail
    } else {
        0.0
    };
    let mean = gap.mean();
    let invariant_mass = if mean.is_finite() { tail / mean } else { 0.0 };
    Ok(GapKernel { transition, invariant_mass })
}

/// State of the gap chain at site `n`: distance to the last mark at or before `n`.
pub fn gap_chain_state(env: &SparseEnvironment, n: i64) -> u64 {
    let k = env.mark_at_or_before(n);
    (n - env.position(k)) as u64
}
