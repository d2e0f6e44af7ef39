use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::potential::{potential_breakpoints, Scale};
use super::valley::{valley_containing_origin, Valley};
use crate::analysis::{classify, Regime};
use crate::env::{sample_environment, EnvironmentSpec, SparseEnvironment};
use crate::error::{Error, Result};
use crate::seed::{replica_seeds, rng, Stream};
use crate::stats::{empirical_quantiles, ks_one_sample, TestResult};
use crate::walk::Stepper;

/// Widening schedule for [`predictor_b_n`], in units of `u(log n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub min_depth: f64,
    pub t_initial: f64,
    pub growth: f64,
    pub t_limit: f64,
    /// Hard cap on the number of sites scanned on each side.
    pub site_limit: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { min_depth: 1.0, t_initial: 1.0, growth: 2.0, t_limit: 1e6, site_limit: 1e12 }
    }
}

/// Valley of the normalized potential that traps the walk at time `n`.
///
/// The window is widened until the chosen valley spans at most half of it,
/// so no valley reaching outside the window could be narrower.
pub fn predictor_valley(env: &SparseEnvironment, n: u64, scale: Scale, cfg: &SearchConfig) -> Result<Valley> {
    let mut t = cfg.t_initial;
    loop {
        let u = scale.u((n as f64).ln())?;
        if t > cfg.t_limit || u * t > cfg.site_limit {
            return Err(Error::BudgetExhausted(format!(
                "no valley of depth {} around the origin within |t| <= {} (n = {n}, u = {u:.3e})",
                cfg.min_depth,
                t / cfg.growth
            )));
        }
        let path = potential_breakpoints(env, n, scale, t)?;
        if let Some(v) = valley_containing_origin(&path, cfg.min_depth) {
            if v.right - v.left <= t {
                return Ok(v);
            }
        }
        t *= cfg.growth;
    }
}

/// Bottom of [`predictor_valley`] in units of `u(log n)`.
pub fn predictor_b_n(env: &SparseEnvironment, n: u64, scale: Scale, cfg: &SearchConfig) -> Result<f64> {
    predictor_valley(env, n, scale, cfg).map(|v| v.bottom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinaiConfig {
    pub n_list: Vec<u64>,
    pub reps: usize,
    pub epsilon: f64,
    pub search: SearchConfig,
}

impl SinaiConfig {
    pub fn new(n_list: Vec<u64>, reps: usize) -> Self {
        SinaiConfig { n_list, reps, epsilon: 0.5, search: SearchConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinaiRecord {
    pub replica: usize,
    pub env_seed: u64,
    pub n: u64,
    pub x_n: i64,
    /// `None` when the valley search ran out of budget.
    pub b_n: Option<f64>,
    pub scale_u: f64,
    pub scaled_x: f64,
    pub inside_valley: bool,
    pub localized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinaiAggregate {
    pub n: u64,
    pub scale_u: f64,
    pub localization_rate: f64,
    pub median_abs_x: f64,
    pub scaled_x_quantiles: [f64; 5],
    pub b_n_quantiles: [f64; 5],
    pub b_n_iqr: f64,
    pub search_failures: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SinaiReport {
    pub scale: Scale,
    pub epsilon: f64,
    pub records: Vec<SinaiRecord>,
    pub aggregates: Vec<SinaiAggregate>,
}

pub const REPORT_QUANTILES: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

impl SinaiReport {
    pub fn aggregate(&self, n: u64) -> Option<&SinaiAggregate> {
        self.aggregates.iter().find(|a| a.n == n)
    }

    /// `|X_n|` values at horizon `n`, in replica order.
    pub fn abs_positions(&self, n: u64) -> Vec<f64> {
        self.records.iter().filter(|r| r.n == n).map(|r| r.x_n.unsigned_abs() as f64).collect()
    }
}

/// Runs one trajectory per replica through the sorted horizons and scores
/// `|X_n / u(log n) - b_n| <= epsilon` at each of them.
pub fn sinai_experiment(spec: &EnvironmentSpec, cfg: &SinaiConfig, master_seed: u64) -> Result<SinaiReport> {
    let report = classify(spec)?;
    if report.classification != Regime::Recurrent {
        return Err(Error::WrongRegime(format!("sinai experiment needs a recurrent spec, got {:?}", report.classification)));
    }
    let mut n_list = cfg.n_list.clone();
    n_list.sort_unstable();
    n_list.dedup();
    if n_list.is_empty() || n_list[0] < 100 || cfg.reps == 0 {
        return Err(Error::Config("sinai experiment needs horizons >= 100 and at least one replica".into()));
    }
    let scale = Scale::for_gap(&spec.gap_dist)?;
    let records: Vec<Vec<SinaiRecord>> = (0..cfg.reps)
        .into_par_iter()
        .map(|i| {
            let (env_seed, walk_seed) = replica_seeds(master_seed, i as u64);
            let env = sample_environment(spec, env_seed, 64)?;
            let mut stepper = Stepper::new(&env, 0, 4096);
            let mut r = rng(walk_seed, Stream::ReplicaWalk, 0);
            let xs = stepper.run_with_checkpoints(0, &n_list, &mut r);
            n_list
                .iter()
                .zip(xs)
                .map(|(&n, x_n)| {
                    let u = scale.u((n as f64).ln())?;
                    let scaled_x = x_n as f64 / u;
                    let valley = match predictor_valley(&env, n, scale, &cfg.search) {
                        Ok(v) => Some(v),
                        Err(Error::BudgetExhausted(_)) => None,
                        Err(e) => return Err(e),
                    };
                    Ok(SinaiRecord {
                        replica: i,
                        env_seed,
                        n,
                        x_n,
                        b_n: valley.map(|v| v.bottom),
                        scale_u: u,
                        scaled_x,
                        inside_valley: valley.is_some_and(|v| v.contains(scaled_x)),
                        localized: valley.is_some_and(|v| (scaled_x - v.bottom).abs() <= cfg.epsilon),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let records: Vec<SinaiRecord> = records.into_iter().flatten().collect();
    let aggregates = n_list
        .iter()
        .map(|&n| {
            let rows: Vec<&SinaiRecord> = records.iter().filter(|r| r.n == n).collect();
            let scaled: Vec<f64> = rows.iter().map(|r| r.scaled_x).collect();
            let abs_x: Vec<f64> = rows.iter().map(|r| r.x_n.unsigned_abs() as f64).collect();
            let b: Vec<f64> = rows.iter().filter_map(|r| r.b_n).collect();
            let q = |v: &[f64]| -> [f64; 5] {
                if v.is_empty() {
                    [f64::NAN; 5]
                } else {
                    empirical_quantiles(v, &REPORT_QUANTILES).try_into().expect("five quantiles")
                }
            };
            let bq = q(&b);
            SinaiAggregate {
                n,
                scale_u: rows[0].scale_u,
                localization_rate: rows.iter().filter(|r| r.localized).count() as f64 / rows.len() as f64,
                median_abs_x: q(&abs_x)[2],
                scaled_x_quantiles: q(&scaled),
                b_n_quantiles: bq,
                b_n_iqr: bq[3] - bq[1],
                search_failures: rows.len() - b.len(),
            }
        })
        .collect();
    Ok(SinaiReport { scale, epsilon: cfg.epsilon, records, aggregates })
}

/// KS distance of `sigma^2 X_n / (log n)^2` against the limit law, for
/// finite-mean gaps with `sigma^2 = E log^2 xi`.
pub fn classical_limit_ks(spec: &EnvironmentSpec, report: &SinaiReport, n: u64) -> Result<TestResult> {
    if report.scale != Scale::Classical {
        return Err(Error::WrongRegime("limit-law comparison applies to finite-mean gaps".into()));
    }
    let sigma2 = spec.expect_xi(|x| x.ln().powi(2))?;
    let sample: Vec<f64> = report.records.iter().filter(|r| r.n == n).map(|r| sigma2 * r.scaled_x).collect();
    ks_one_sample(&sample, crate::analysis::sinai_cdf)
}
