//! Sparse random environments: laws, lazy realizations and the dual
//! (size-biased, uniformly shifted) construction.

mod dist;
mod dual;
mod environment;

pub use dist::{lambda_from_xi, xi_from_lambda, Dist, GapLaw, Support, MAX_GAP};
pub use dual::{dual_gap_kernel, dualize, gap_chain_state, sample_dual, DualMode, DualSampleWeight, GapKernel};
pub use environment::{sample_environment, EnvRow, Mark, SparseEnvironment};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Law of the i.i.d. pairs `(lambda_k, d_k)`, with `lambda` independent of `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    #[serde(rename = "lambda")]
    pub lambda_dist: Dist,
    #[serde(rename = "gap")]
    pub gap_dist: Dist,
    #[serde(default = "default_iid")]
    pub iid: bool,
    #[serde(default)]
    pub ellipticity_eps: f64,
}

fn default_iid() -> bool {
    true
}

impl EnvironmentSpec {
    pub fn new(lambda_dist: Dist, gap_dist: Dist) -> Result<Self> {
        let spec = EnvironmentSpec { lambda_dist, gap_dist, iid: true, ellipticity_eps: 0.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_ellipticity(mut self, eps: f64) -> Result<Self> {
        self.ellipticity_eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.iid {
            return Err(Error::Config("only i.i.d. pair laws are supported (iid = true)".into()));
        }
        if !(0.0..0.5).contains(&self.ellipticity_eps) {
            return Err(Error::Config(format!("ellipticity_eps = {} must lie in [0, 1/2)", self.ellipticity_eps)));
        }
        self.lambda_dist.validate(Support::UnitInterval, self.ellipticity_eps)?;
        self.gap_dist.validate(Support::PositiveInteger, 0.0)
    }

    /// `E f(xi_0)` with `xi_0 = (1 - lambda_0) / lambda_0`.
    pub fn expect_xi<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.lambda_dist.expect_lambda(|l| f(xi_from_lambda(l)))
    }

    /// Largest value of `xi_0` on the support.
    pub fn xi_max(&self) -> f64 {
        xi_from_lambda(self.lambda_dist.support_range().0)
    }

    pub fn xi_min(&self) -> f64 {
        xi_from_lambda(self.lambda_dist.support_range().1)
    }
}
