use std::path::{Path, PathBuf};

use rwsre::EnvironmentSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything a command needs; saved verbatim inside each report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(rename = "seed")]
    pub master_seed: u64,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub spec: EnvironmentSpec,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunParams {
    /// Environments (or replicas) per Monte Carlo estimate.
    pub replicas: usize,
    pub horizon: u64,
    pub dual_samples: usize,
    /// Horizons for `stable` and the localization part of `sinai`.
    pub n_list: Vec<u64>,
    /// The two horizons compared by the `sinai` quantile-ratio check.
    pub ratio_horizons: Vec<u64>,
    pub epsilon: f64,
    /// Replaces the gap law by `pareto_gap(alpha)` when set.
    pub alpha: Option<f64>,
    /// Significance level of hard-gate tests (pass when p exceeds it).
    pub significance: f64,
    pub series_tol: f64,
    pub identity_envs: usize,
    pub identity_marks: usize,
    /// Fraction of the sample used as the Hill tail.
    pub hill_fraction: f64,
    /// Agreement width, in combined standard errors.
    pub se_width: f64,
    /// Mark range `[-dump_marks, dump_marks]` for `env-dump`.
    pub dump_marks: i64,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            replicas: 64,
            horizon: 1_000_000,
            dual_samples: 10_000,
            n_list: Vec::new(),
            ratio_horizons: Vec::new(),
            epsilon: 0.5,
            alpha: None,
            significance: 0.001,
            series_tol: 1e-10,
            identity_envs: 100,
            identity_marks: 200,
            hill_fraction: 0.1,
            se_width: 3.0,
            dump_marks: 20,
        }
    }
}

/// Which maximality bound a sweep is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum SweepBound {
    /// `E d = mu`, `E log xi = b`.
    FixedB { mu: f64, b: f64 },
    /// `E d = mu`, `1 / E S-bar = nu`.
    FixedSBar { mu: f64, nu: f64 },
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(flatten)]
    pub bound: SweepBound,
    pub points: Vec<EnvironmentSpec>,
}

impl RunConfig {
    pub fn new(spec: EnvironmentSpec, master_seed: u64) -> Self {
        RunConfig { master_seed, workers: 1, out: None, spec, run: RunParams::default(), sweep: None }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.effective_spec()?;
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if let Some(sw) = &self.sweep {
            for p in &sw.points {
                p.validate().map_err(CliError::from_core)?;
            }
        }
        Ok(())
    }

    /// The spec with the `alpha` override applied.
    pub fn effective_spec(&self) -> Result<EnvironmentSpec, CliError> {
        let mut spec = self.spec.clone();
        if let Some(alpha) = self.run.alpha {
            spec.gap_dist = rwsre::Dist::pareto_gap(alpha);
        }
        spec.validate().map_err(CliError::from_core)?;
        Ok(spec)
    }
}
