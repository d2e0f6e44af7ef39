use rwsre::analysis::{identity_e_s_tilde, speed_formula, speed_reweighted_diagnostic, speed_via_dual, DualSpeedEstimate, Regime, STildeReport, SeriesControl, SpeedBreakdown};
use rwsre::seed::replica_seeds;
use rwsre::walk::{estimate_speed_direct, SpeedSummary};
use rwsre::EnvironmentSpec;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{agree, ExperimentReport, ReportBuilder, Table, Verdict};
use crate::CliResult;

/// One speed estimate with its standard error (zero for closed forms).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedEstimate {
    pub name: String,
    pub v: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeedOutcome {
    pub formula: SpeedBreakdown,
    pub monte_carlo: SpeedSummary,
    pub dual_lambda: Option<DualSpeedEstimate>,
    pub dual_s_tilde: Option<STildeReport>,
    /// Expected to disagree; reported for comparison only.
    pub reweighted_diagnostic: Option<DualSpeedEstimate>,
    pub estimates: Vec<NamedEstimate>,
    pub skipped: Vec<String>,
}

impl SpeedOutcome {
    pub fn estimate(&self, name: &str) -> Option<&NamedEstimate> {
        self.estimates.iter().find(|e| e.name == name)
    }
}

pub const FORMULA: &str = "formula";
pub const MONTE_CARLO: &str = "monte_carlo";
pub const DUAL_LAMBDA: &str = "dual_lambda";
pub const DUAL_S_TILDE: &str = "dual_s_tilde";

pub(crate) fn speed_outcome(spec: &EnvironmentSpec, config: &RunConfig, rb: &mut ReportBuilder) -> CliResult<SpeedOutcome> {
    let p = &config.run;
    let formula = speed_formula(spec)?;
    let mc = estimate_speed_direct(spec, p.replicas, p.horizon, super::sub_seed(config, 0))?;
    rb.walk_steps += p.horizon * p.replicas as u64;
    let mut t = Table::new(&["replica", "env_seed", "velocity"]);
    for (i, v) in mc.replica_velocities().iter().enumerate() {
        t.push(vec![json!(i), json!(replica_seeds(super::sub_seed(config, 0), i as u64).0), json!(v)]);
    }
    rb.records = t;

    let mut estimates = vec![
        NamedEstimate { name: FORMULA.into(), v: formula.v, stderr: 0.0 },
        NamedEstimate { name: MONTE_CARLO.into(), v: mc.mean, stderr: mc.stderr },
    ];
    let mut skipped = Vec::new();
    let ctrl = SeriesControl { tol: p.series_tol, ..Default::default() };
    let (mut dual_lambda, mut dual_s_tilde, mut reweighted) = (None, None, None);
    if formula.regime == Regime::TransientRight {
        match speed_via_dual(spec, p.dual_samples, &ctrl, super::sub_seed(config, 1)) {
            Ok(d) => {
                estimates.push(NamedEstimate { name: DUAL_LAMBDA.into(), v: d.v, stderr: d.v_stderr });
                dual_lambda = Some(d);
            }
            Err(e) => skipped.push(format!("{DUAL_LAMBDA}: {e}")),
        }
        match identity_e_s_tilde(spec, p.dual_samples, &ctrl, super::sub_seed(config, 2)) {
            Ok(s) => {
                estimates.push(NamedEstimate { name: DUAL_S_TILDE.into(), v: s.estimate.v, stderr: s.estimate.v_stderr });
                dual_s_tilde = Some(s);
            }
            Err(e) => skipped.push(format!("{DUAL_S_TILDE}: {e}")),
        }
        reweighted = speed_reweighted_diagnostic(spec, p.dual_samples, &ctrl, super::sub_seed(config, 3)).ok();
    } else {
        skipped.push(format!("dual estimators: need a right-transient spec, got {:?}", formula.regime));
    }
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let (a, b) = (&estimates[i], &estimates[j]);
            // Dual series are truncated at `series_tol`; zero-variance cases differ by that much.
            let truncation = 2.0 * p.series_tol * a.v.abs().max(b.v.abs()).max(1.0);
            let ok = agree((a.v, a.stderr), (b.v, b.stderr), p.se_width) || (a.v - b.v).abs() <= truncation;
            rb.verdict(Verdict::hard(
                format!("{} ~ {}", a.name, b.name),
                ok,
                format!("{:.6} +- {:.2e} vs {:.6} +- {:.2e}", a.v, a.stderr, b.v, b.stderr),
            ));
        }
    }
    Ok(SpeedOutcome { formula, monte_carlo: mc.summary(), dual_lambda, dual_s_tilde, reweighted_diagnostic: reweighted, estimates, skipped })
}

/// Closed form, Monte Carlo and both dual representations of the speed,
/// checked pairwise.
pub fn cmd_speed(config: &RunConfig) -> CliResult<ExperimentReport> {
    run_speed(config).map(|(_, r)| r)
}

pub fn run_speed(config: &RunConfig) -> CliResult<(SpeedOutcome, ExperimentReport)> {
    let spec = config.effective_spec()?;
    let mut rb = ReportBuilder::new("speed", config);
    let out = speed_outcome(&spec, config, &mut rb)?;
    rb.plots.push(crate::report::PlotSeries {
        name: "estimates".into(),
        x_label: "method".into(),
        y_label: "v".into(),
        points: out.estimates.iter().enumerate().map(|(i, e)| (i as f64, e.v, e.stderr)).collect(),
    });
    let report = rb.finish(&out);
    Ok((out, report))
}
