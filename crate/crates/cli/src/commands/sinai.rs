use rwsre::sinai::{classical_limit_ks, sinai_experiment, Scale, SinaiAggregate, SinaiConfig};
use rwsre::stats::TestResult;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{ExperimentReport, PlotSeries, ReportBuilder, Table, Verdict};
use crate::CliResult;

/// Minimum localization rate at the largest horizon.
pub const LOCALIZATION_FLOOR: f64 = 0.6;
/// Allowed factor between observed and predicted median ratios.
pub const RATIO_FACTOR: f64 = 2.0;
const DEFAULT_HORIZONS: [u64; 3] = [10_000, 100_000, 1_000_000];

#[derive(Debug, Clone, Serialize)]
pub struct RatioCheck {
    pub n1: u64,
    pub n2: u64,
    pub observed: f64,
    /// `u(log n2) / u(log n1)`.
    pub predicted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SinaiOutcome {
    pub scale: Scale,
    pub epsilon: f64,
    pub localization: Vec<SinaiAggregate>,
    pub ratio: Option<RatioCheck>,
    /// Finite-mean gaps only: `sigma^2 X_n / (log n)^2` against the limit law.
    pub limit_ks: Option<TestResult>,
}

pub fn cmd_sinai(config: &RunConfig) -> CliResult<ExperimentReport> {
    run_sinai(config).map(|(_, r)| r)
}

pub fn run_sinai(config: &RunConfig) -> CliResult<(SinaiOutcome, ExperimentReport)> {
    let spec = config.effective_spec()?;
    let mut rb = ReportBuilder::new("sinai", config);
    let p = &config.run;
    let horizons = if p.n_list.is_empty() { DEFAULT_HORIZONS.to_vec() } else { p.n_list.clone() };
    let mut all = horizons.clone();
    all.extend(&p.ratio_horizons);
    let mut cfg = SinaiConfig::new(all, p.replicas);
    cfg.epsilon = p.epsilon;
    let report = sinai_experiment(&spec, &cfg, super::sub_seed(config, 0))?;
    rb.walk_steps = report.aggregates.iter().map(|a| a.n).max().unwrap_or(0) * p.replicas as u64;

    let mut t = Table::new(&["replica", "env_seed", "n", "x_n", "b_n", "scale_u", "scaled_x", "inside", "localized"]);
    for r in &report.records {
        t.push(vec![
            json!(r.replica),
            json!(r.env_seed),
            json!(r.n),
            json!(r.x_n),
            json!(r.b_n),
            json!(r.scale_u),
            json!(r.scaled_x),
            json!(r.inside_valley),
            json!(r.localized),
        ]);
    }
    rb.records = t;

    let localization: Vec<SinaiAggregate> = horizons.iter().filter_map(|&n| report.aggregate(n).cloned()).collect();
    let rates: Vec<f64> = localization.iter().map(|a| a.localization_rate).collect();
    let summary = rates.iter().zip(&horizons).map(|(r, n)| format!("{n}: {r:.3}")).collect::<Vec<_>>().join(", ");
    if let Some(&top) = rates.last() {
        rb.verdict(Verdict::hard("localization rate at largest n", top >= LOCALIZATION_FLOOR, summary.clone()));
    }
    rb.verdict(Verdict::hard("localization rate nondecreasing in n", rates.windows(2).all(|w| w[1] >= w[0]), summary));
    if let Some(a) = localization.last() {
        rb.verdict(Verdict::hard("b_n nondegenerate", a.b_n_iqr > 0.0, format!("IQR {:.4} at n = {}", a.b_n_iqr, a.n)));
    }
    rb.plots.push(PlotSeries {
        name: "localization".into(),
        x_label: "n".into(),
        y_label: "rate".into(),
        points: localization
            .iter()
            .map(|a| {
                let reps = p.replicas as f64;
                (a.n as f64, a.localization_rate, (a.localization_rate * (1.0 - a.localization_rate) / reps).sqrt())
            })
            .collect(),
    });

    let mut ratio = None;
    if let [n1, n2] = p.ratio_horizons[..] {
        let (a1, a2) = (report.aggregate(n1), report.aggregate(n2));
        if let (Some(a1), Some(a2)) = (a1, a2) {
            let observed = a2.median_abs_x / a1.median_abs_x;
            let predicted = a2.scale_u / a1.scale_u;
            let ok = observed <= predicted * RATIO_FACTOR && observed >= predicted / RATIO_FACTOR;
            rb.verdict(Verdict::hard("median |X_n| grows like u(log n)", ok, format!("{observed:.3} vs {predicted:.3}")));
            ratio = Some(RatioCheck { n1, n2, observed, predicted });
        }
    }

    let mut limit_ks = None;
    if report.scale == Scale::Classical {
        let n = *horizons.iter().max().expect("nonempty horizons");
        let ks = classical_limit_ks(&spec, &report, n)?;
        // Convergence to the limit law is slow; the distance is informational.
        rb.verdict(Verdict::soft("limit law KS distance", true, format!("D = {:.4}, p = {:.4} at n = {n}", ks.statistic, ks.p_value)));
        limit_ks = Some(ks);
        if let (Some(first), Some(last)) = (localization.first(), localization.last()) {
            let (q1, q2) = (first.scaled_x_quantiles, last.scaled_x_quantiles);
            let spread = |q: [f64; 5]| q[3] - q[1];
            let f = spread(q2) / spread(q1);
            rb.verdict(Verdict::hard(
                "X_n / (log n)^2 quantiles stable",
                (1.0 / RATIO_FACTOR..=RATIO_FACTOR).contains(&f),
                format!("IQR ratio {f:.3} between n = {} and {}", first.n, last.n),
            ));
        }
    }
    let out = SinaiOutcome { scale: report.scale, epsilon: report.epsilon, localization, ratio, limit_ks };
    let report = rb.finish(&out);
    Ok((out, report))
}
