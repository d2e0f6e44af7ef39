use rayon::prelude::*;
use rwsre::analysis::{kappa_root, speed_formula, Regime};
use rwsre::seed::{replica_seeds, rng, Stream};
use rwsre::stats::{hill_estimator, ks_one_sample, ks_two_sample, median, median_scaling_regression, BootstrapConfig, ScalingFit, TestResult};
use rwsre::walk::sample_hitting_time;
use rwsre::{sample_environment, EnvironmentSpec, Error};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{ExperimentReport, PlotSeries, ReportBuilder, Table, Verdict};
use crate::{CliError, CliResult};

/// Level of the two-sample self-similarity test.
pub const SELF_SIMILARITY_LEVEL: f64 = 0.01;
/// Relative slack on the median growth exponent `1 / kappa`.
pub const SLOPE_SLACK: f64 = 0.2;
/// Absolute slack on the Hill estimate of `kappa`.
pub const HILL_SLACK: f64 = 0.15;
const DEFAULT_GRID: [u64; 4] = [200, 400, 800, 1600];

#[derive(Debug, Clone, Serialize)]
pub struct HorizonSummary {
    pub n: u64,
    pub median: f64,
    pub mean: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StableOutcome {
    /// `None` when `E xi^s < 1` for every `s > 0`.
    pub kappa: Option<f64>,
    pub horizons: Vec<HorizonSummary>,
    pub median_fit: Option<ScalingFit>,
    /// `T_n / n^{1/kappa}` at the two largest horizons.
    pub self_similarity: Option<TestResult>,
    pub hill: Option<f64>,
    /// `(n, KS of (T_n - n/v) / sd against the standard normal)`.
    pub clt: Vec<(u64, TestResult)>,
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Exact draws of `T_n`, one fresh environment per replica. A draw that
/// runs past the left window is replayed from the same seed with a wider
/// one, so the window never conditions the sample.
fn hitting_times(spec: &EnvironmentSpec, n: u64, reps: usize, master: u64) -> CliResult<Vec<f64>> {
    (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let (env_seed, walk_seed) = replica_seeds(master, i);
            let env = sample_environment(spec, env_seed, 64)?;
            let mut window = 1024;
            loop {
                let mut r = rng(walk_seed, Stream::ReplicaWalk, 0);
                match sample_hitting_time(&env, n as i64, window, &mut r) {
                    Ok(t) => return Ok(t as f64),
                    Err(Error::BudgetExhausted(_)) if window < 1 << 26 => window *= 8,
                    Err(e) => return Err(e.into()),
                }
            }
        })
        .collect()
}

/// Fluctuations of `T_n`: stable scaling when `kappa < 2`, Gaussian when
/// `kappa > 2`.
pub fn cmd_stable(config: &RunConfig) -> CliResult<ExperimentReport> {
    run_stable(config).map(|(_, r)| r)
}

pub fn run_stable(config: &RunConfig) -> CliResult<(StableOutcome, ExperimentReport)> {
    let spec = config.effective_spec()?;
    let mut rb = ReportBuilder::new("stable", config);
    let p = &config.run;
    let regime = speed_formula(&spec)?;
    if regime.regime != Regime::TransientRight {
        return Err(CliError::Config(format!("stable needs a right-transient spec, got {:?}", regime.regime)));
    }
    let kappa = match kappa_root(&spec) {
        Ok(k) => Some(k),
        Err(Error::NoFiniteKappa) => None,
        Err(e) => return Err(e.into()),
    };
    let mut grid = if p.n_list.is_empty() { DEFAULT_GRID.to_vec() } else { p.n_list.clone() };
    grid.sort_unstable();
    grid.dedup();
    let reps = p.replicas;
    let mut t = Table::new(&["n", "replica", "env_seed", "t_n"]);
    let mut groups = Vec::new();
    for (gi, &n) in grid.iter().enumerate() {
        let master = rwsre::seed::derive(super::sub_seed(config, 0), Stream::Aux(gi as u32), n);
        let xs = hitting_times(&spec, n, reps, master)?;
        for (i, x) in xs.iter().enumerate() {
            t.push(vec![json!(n), json!(i), json!(replica_seeds(master, i as u64).0), json!(x)]);
        }
        rb.walk_steps += xs.iter().sum::<f64>() as u64;
        groups.push((n as f64, xs));
    }
    rb.records = t;
    let horizons: Vec<HorizonSummary> = groups
        .iter()
        .map(|(n, xs)| HorizonSummary { n: *n as u64, median: median(xs), mean: xs.iter().sum::<f64>() / xs.len() as f64, samples: xs.len() })
        .collect();
    rb.plots.push(PlotSeries {
        name: "median_t_n".into(),
        x_label: "n".into(),
        y_label: "median_T_n".into(),
        points: horizons.iter().map(|h| (h.n as f64, h.median, 0.0)).collect(),
    });

    let mut out = StableOutcome { kappa, horizons, median_fit: None, self_similarity: None, hill: None, clt: Vec::new() };
    let last = groups.len() - 1;
    let hill_k = ((p.hill_fraction * reps as f64).round() as usize).max(2);
    match kappa {
        Some(k) if k < 2.0 => {
            let strict = k < 1.0;
            let gate = |name: &str, ok: bool, detail: String| if strict { Verdict::hard(name, ok, detail) } else { Verdict::soft(name, ok, detail) };
            let centred: Vec<(f64, Vec<f64>)> = if strict {
                groups.clone()
            } else {
                // Linear growth dominates for kappa >= 1; take fluctuations about the median.
                groups.iter().map(|(n, xs)| (*n, xs.iter().map(|x| (x - median(xs)).abs()).collect())).collect()
            };
            if groups.len() >= 3 {
                let fit = median_scaling_regression(&centred, &BootstrapConfig { seed: super::sub_seed(config, 1), ..Default::default() })?;
                let target = 1.0 / k;
                rb.verdict(gate(
                    "median growth exponent",
                    (fit.slope - target).abs() <= SLOPE_SLACK * target,
                    format!("slope {:.3} [{:.3}, {:.3}] vs 1/kappa = {target:.3}", fit.slope, fit.ci_low, fit.ci_high),
                ));
                out.median_fit = Some(fit);
            }
            if last >= 1 {
                let scaled = |g: &(f64, Vec<f64>)| -> Vec<f64> {
                    let s = g.0.powf(1.0 / k);
                    let m = if strict { 0.0 } else { median(&g.1) };
                    g.1.iter().map(|x| (x - m) / s).collect()
                };
                let ks = ks_two_sample(&scaled(&groups[last - 1]), &scaled(&groups[last]))?;
                rb.verdict(gate(
                    "self-similar T_n / n^(1/kappa)",
                    ks.p_value > SELF_SIMILARITY_LEVEL,
                    format!("KS D = {:.4}, p = {:.4}", ks.statistic, ks.p_value),
                ));
                out.self_similarity = Some(ks);
            }
            let hill = hill_estimator(&groups[last].1, hill_k)?;
            rb.verdict(gate("Hill index of T_n", (hill - k).abs() <= HILL_SLACK, format!("{hill:.3} vs kappa = {k:.3} (k = {hill_k})")));
            out.hill = Some(hill);
        }
        _ => {
            // kappa > 2 (or none): Gaussian fluctuations around n / v.
            let v = regime.v;
            for (n, xs) in groups.iter().skip(groups.len().saturating_sub(3)) {
                let centred: Vec<f64> = xs.iter().map(|x| x - n / v).collect();
                let sd = (centred.iter().map(|c| c * c).sum::<f64>() / centred.len() as f64 - (centred.iter().sum::<f64>() / centred.len() as f64).powi(2)).sqrt();
                let z: Vec<f64> = centred.iter().map(|c| c / sd).collect();
                let ks = ks_one_sample(&z, normal_cdf)?;
                rb.verdict(Verdict::hard(format!("CLT at n = {n}"), ks.passes(p.significance), format!("KS D = {:.4}, p = {:.4}", ks.statistic, ks.p_value)));
                out.clt.push((*n as u64, ks));
            }
            out.hill = Some(hill_estimator(&groups[last].1, hill_k)?);
        }
    }
    let report = rb.finish(&out);
    Ok((out, report))
}
