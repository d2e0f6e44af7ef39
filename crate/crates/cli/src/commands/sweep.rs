use rwsre::analysis::{classify, max_speed_fixed_b, max_speed_fixed_s_bar, mean_s_bar, speed_formula, SpeedBreakdown};
use rwsre::{EnvironmentSpec, GapLaw};
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, SweepBound};
use crate::report::{ExperimentReport, PlotSeries, ReportBuilder, Table, Verdict};
use crate::{CliError, CliResult};

/// Relative tolerance for the sweep constraints and the attained bound.
pub const SWEEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub spec: EnvironmentSpec,
    pub mean_d: f64,
    pub var_d: f64,
    pub e_log_xi: f64,
    pub formula: SpeedBreakdown,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub bound: SweepBound,
    pub bound_value: Option<f64>,
    pub points: Vec<SweepPoint>,
    /// Set for single-point sweeps, which run the full speed command.
    pub speed: Option<super::SpeedOutcome>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SWEEP_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Closed-form speed across a grid of specs, checked against a maximality bound.
pub fn cmd_sweep(config: &RunConfig) -> CliResult<ExperimentReport> {
    run_sweep(config).map(|(_, r)| r)
}

pub fn run_sweep(config: &RunConfig) -> CliResult<(SweepOutcome, ExperimentReport)> {
    let sweep = config.sweep.as_ref().ok_or_else(|| CliError::Config("sweep needs a [sweep] table".into()))?;
    if sweep.points.is_empty() {
        return Err(CliError::Config("sweep needs at least one point".into()));
    }
    let mut rb = ReportBuilder::new("sweep", config);
    let mut points = Vec::new();
    for spec in &sweep.points {
        let e_log_xi = classify(spec)?.e_log_xi;
        points.push(SweepPoint {
            spec: spec.clone(),
            mean_d: spec.gap_dist.mean(),
            var_d: spec.gap_dist.variance(),
            e_log_xi,
            formula: speed_formula(spec)?,
        });
    }
    let mut speed = None;
    if points.len() == 1 {
        speed = Some(super::speed::speed_outcome(&points[0].spec, config, &mut rb)?);
    }

    let bound_value = match sweep.bound {
        SweepBound::FixedB { mu, b } => {
            for pt in &points {
                if !close(pt.mean_d, mu) || !close(pt.e_log_xi, b) {
                    return Err(CliError::Config(format!("sweep point has (E d, E log xi) = ({}, {}), not ({mu}, {b})", pt.mean_d, pt.e_log_xi)));
                }
            }
            Some(max_speed_fixed_b(mu, b)?)
        }
        SweepBound::FixedSBar { mu, nu } => {
            for pt in &points {
                let s = mean_s_bar(&pt.spec)?;
                if !close(pt.mean_d, mu) || !close(1.0 / s, nu) {
                    return Err(CliError::Config(format!("sweep point has (E d, 1/E S) = ({}, {}), not ({mu}, {nu})", pt.mean_d, 1.0 / s)));
                }
            }
            Some(max_speed_fixed_s_bar(mu, nu)?)
        }
        SweepBound::None => None,
    };

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].var_d.total_cmp(&points[b].var_d));
    let mut t = Table::new(&["point", "mean_d", "var_d", "e_log_xi", "var_term", "s_bar_term", "v"]);
    for (i, pt) in points.iter().enumerate() {
        t.push(vec![json!(i), json!(pt.mean_d), json!(pt.var_d), json!(pt.e_log_xi), json!(pt.formula.var_term), json!(pt.formula.s_bar_term), json!(pt.formula.v)]);
    }
    if speed.is_none() {
        rb.records = t;
    }
    rb.plots.push(PlotSeries {
        name: "speed_vs_var".into(),
        x_label: "var_d".into(),
        y_label: "v".into(),
        points: order.iter().map(|&i| (points[i].var_d, points[i].formula.v, 0.0)).collect(),
    });
    if points.len() > 1 {
        let decreasing = order.windows(2).all(|w| points[w[1]].var_d > points[w[0]].var_d && points[w[1]].formula.v < points[w[0]].formula.v);
        rb.verdict(Verdict::hard("speed strictly decreasing in VAR d", decreasing, format!("{} points", points.len())));
    }
    if let Some(bound) = bound_value {
        let best = order.iter().copied().max_by(|&a, &b| points[a].formula.v.total_cmp(&points[b].formula.v)).expect("nonempty");
        let below = points.iter().all(|pt| pt.formula.v <= bound * (1.0 + SWEEP_TOL));
        rb.verdict(Verdict::hard("no point exceeds the bound", below, format!("bound {bound:.12}")));
        let attained = points[best].var_d == 0.0 && close(points[best].formula.v, bound);
        rb.verdict(Verdict::hard(
            "maximum at VAR d = 0 equals the bound",
            attained,
            format!("max {:.12} at VAR {} vs {bound:.12}", points[best].formula.v, points[best].var_d),
        ));
    }
    let out = SweepOutcome { bound: sweep.bound, bound_value, points, speed };
    let report = rb.finish(&out);
    Ok((out, report))
}
