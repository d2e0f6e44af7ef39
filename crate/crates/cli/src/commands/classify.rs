use rwsre::analysis::{classify, Regime, RegimeReport};
use rwsre::walk::recurrence_diagnostic;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{ExperimentReport, ReportBuilder, Table, Verdict};
use crate::CliResult;

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyOutcome {
    pub regime: RegimeReport,
    pub horizon: u64,
    pub fraction_returned: f64,
    pub median_sign_changes: f64,
    pub median_max: f64,
    pub median_min: f64,
    pub fraction_right: f64,
    pub fraction_left: f64,
}

/// Closed-form classification corroborated by simulated paths.
pub fn cmd_classify(config: &RunConfig) -> CliResult<ExperimentReport> {
    run_classify(config).map(|(_, r)| r)
}

pub fn run_classify(config: &RunConfig) -> CliResult<(ClassifyOutcome, ExperimentReport)> {
    let spec = config.effective_spec()?;
    let mut rb = ReportBuilder::new("classify", config);
    let regime = classify(&spec)?;
    let reps = config.run.replicas.max(2);
    let diag = recurrence_diagnostic(&spec, config.run.horizon, reps, super::sub_seed(config, 0))?;
    rb.walk_steps = config.run.horizon * reps as u64;
    let mut t = Table::new(&["replica", "env_seed", "walk_seed", "sign_changes", "max", "min", "returns", "final_position"]);
    for (i, r) in diag.records.iter().enumerate() {
        t.push(vec![
            json!(i),
            json!(r.env_seed),
            json!(r.walk_seed),
            json!(r.sign_changes),
            json!(r.max),
            json!(r.min),
            json!(r.returns),
            json!(r.final_position),
        ]);
    }
    rb.records = t;
    let n = diag.records.len() as f64;
    let fraction_right = diag.records.iter().filter(|r| r.final_position > 0).count() as f64 / n;
    let fraction_left = diag.records.iter().filter(|r| r.final_position < 0).count() as f64 / n;
    let (name, ok) = match regime.classification {
        Regime::TransientRight => ("paths end right", fraction_right >= 0.9),
        Regime::TransientLeft => ("paths end left", fraction_left >= 0.9),
        Regime::Recurrent | Regime::RecurrentHeavyGaps => ("paths return to the origin", diag.fraction_returned >= 0.9),
    };
    // Finite horizons only suggest the regime, so the corroboration is soft.
    rb.verdict(Verdict::soft(
        name,
        ok,
        format!("right {fraction_right:.3}, left {fraction_left:.3}, returned {:.3}", diag.fraction_returned),
    ));
    let out = ClassifyOutcome {
        regime,
        horizon: config.run.horizon,
        fraction_returned: diag.fraction_returned,
        median_sign_changes: diag.median_sign_changes,
        median_max: diag.median_max,
        median_min: diag.median_min,
        fraction_right,
        fraction_left,
    };
    let report = rb.finish(&out);
    Ok((out, report))
}
