use rayon::prelude::*;
use rwsre::analysis::dual_gap_moments;
use rwsre::env::{dual_gap_kernel, gap_chain_state};
use rwsre::seed::replica_seeds;
use rwsre::stats::{chi_square_gof, mean_stderr, TestResult};
use rwsre::{sample_dual, DualMode, GapLaw};
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{ExperimentReport, PlotSeries, ReportBuilder, Verdict};
use crate::CliResult;

/// Gap-chain states above this are pooled into one tail bin.
const MAX_STATE: u64 = 63;
/// Sites walked along each dual sample for transition counts.
const CHAIN_SITES: i64 = 32;
/// Width, in standard errors, of the frequency and moment checks.
const MOMENT_SE: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
}

impl Check {
    fn z(&self) -> f64 {
        (self.estimate - self.target) / self.stderr
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DualCheckOutcome {
    pub samples: usize,
    pub marked_origin: Check,
    pub e_q_d: Option<Check>,
    pub e_q_a0: Option<Check>,
    /// `E_P d^2 - E_P d * E_Q d` from the closed forms.
    pub moment_identity_gap: Option<f64>,
    pub invariant_law: Option<TestResult>,
    pub kernel_rows: Vec<(u64, TestResult)>,
}

struct DualDraw {
    marked: bool,
    d0: f64,
    a0: f64,
    transitions: Vec<(u64, u64)>,
}

pub fn cmd_dual_check(config: &RunConfig) -> CliResult<ExperimentReport> {
    run_dual_check(config).map(|(_, r)| r)
}

pub fn run_dual_check(config: &RunConfig) -> CliResult<(DualCheckOutcome, ExperimentReport)> {
    let spec = config.effective_spec()?;
    let mut rb = ReportBuilder::new("dual-check", config);
    let n = config.run.dual_samples;
    let seed = super::sub_seed(config, 0);
    let draws: Vec<DualDraw> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let (env, _) = sample_dual(&spec, replica_seeds(seed, i).0, 4, DualMode::Direct)?;
            let transitions = (0..CHAIN_SITES).map(|s| (gap_chain_state(&env, s), gap_chain_state(&env, s + 1))).collect();
            Ok(DualDraw {
                marked: env.origin_marked(),
                d0: (env.position(0) - env.position(-1)) as f64,
                a0: env.position(0) as f64,
                transitions,
            })
        })
        .collect::<rwsre::Result<_>>()?;

    let gap = &spec.gap_dist;
    let p = 1.0 / gap.mean();
    let freq = draws.iter().filter(|d| d.marked).count() as f64 / n as f64;
    let marked_origin = Check { estimate: freq, stderr: (p * (1.0 - p) / n as f64).sqrt().max(f64::MIN_POSITIVE), target: p };
    rb.verdict(Verdict::hard(
        "marked-origin frequency = 1 / E d",
        marked_origin.z().abs() <= MOMENT_SE || (p == 1.0 && freq == 1.0),
        format!("{freq:.5} vs {p:.5}"),
    ));

    let (mut e_q_d, mut e_q_a0, mut moment_identity_gap) = (None, None, None);
    if let Ok((eq_d, eq_a0)) = dual_gap_moments(gap) {
        let (m, se) = mean_stderr(&draws.iter().map(|d| d.d0).collect::<Vec<_>>());
        let c = Check { estimate: m, stderr: se, target: eq_d };
        rb.verdict(Verdict::hard("E_Q d", se == 0.0 && m == eq_d || c.z().abs() <= MOMENT_SE, format!("{m:.5} +- {se:.2e} vs {eq_d:.5}")));
        e_q_d = Some(c);
        let (m, se) = mean_stderr(&draws.iter().map(|d| d.a0).collect::<Vec<_>>());
        let c = Check { estimate: m, stderr: se, target: eq_a0 };
        rb.verdict(Verdict::hard("E_Q a0", se == 0.0 && m == eq_a0 || c.z().abs() <= MOMENT_SE, format!("{m:.5} +- {se:.2e} vs {eq_a0:.5}")));
        e_q_a0 = Some(c);
        moment_identity_gap = Some(gap.second_moment() - gap.mean() * eq_d);
    }

    // Invariant law of the gap chain at the origin.
    let top = gap.max_gap().map_or(MAX_STATE, |m| m.saturating_sub(1).min(MAX_STATE));
    let mut counts = vec![0u64; top as usize + 2];
    let mut probs = vec![0.0; top as usize + 2];
    for x in 0..=top {
        probs[x as usize] = dual_gap_kernel(gap, x, 0)?.invariant_mass;
    }
    probs[top as usize + 1] = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    for d in &draws {
        let y0 = d.transitions[0].0.min(top + 1);
        counts[y0 as usize] += 1;
    }
    let (obs, pr) = drop_empty_bins(&counts, &probs);
    let invariant_law = if pr.len() > 1 {
        let t = chi_square_gof(&obs, &pr)?;
        rb.verdict(Verdict::hard(
            "gap chain starts in its invariant law",
            t.passes(config.run.significance),
            format!("chi2 = {:.3}, p = {:.4}", t.statistic, t.p_value),
        ));
        Some(t)
    } else {
        rb.verdict(Verdict::hard("gap chain starts in its invariant law", obs[0] == n as u64, "single state"));
        None
    };

    // Rows of the transition kernel with two reachable states.
    let mut kernel_rows = Vec::new();
    for x in 0..=top.min(8) {
        let (stay, reset) = (dual_gap_kernel(gap, x, x + 1)?.transition, dual_gap_kernel(gap, x, 0)?.transition);
        let row: Vec<&(u64, u64)> = draws.iter().flat_map(|d| d.transitions.iter()).filter(|t| t.0 == x).collect();
        let up = row.iter().filter(|t| t.1 == x + 1).count() as u64;
        let zero = row.iter().filter(|t| t.1 == 0).count() as u64;
        let other = row.len() as u64 - up - zero;
        rb.verdict(Verdict::hard(format!("gap chain row {x} support"), other == 0, format!("{other} impossible transitions")));
        if stay > 0.0 && reset > 0.0 && row.len() >= 50 {
            let t = chi_square_gof(&[up, zero], &[stay, reset])?;
            rb.verdict(Verdict::hard(format!("gap chain row {x}"), t.passes(config.run.significance), format!("p = {:.4}", t.p_value)));
            kernel_rows.push((x, t));
        }
    }
    rb.plots.push(PlotSeries {
        name: "invariant".into(),
        x_label: "state".into(),
        y_label: "frequency".into(),
        points: counts
            .iter()
            .zip(&probs)
            .enumerate()
            .map(|(x, (&c, &q))| (x as f64, c as f64 / n as f64, (q * (1.0 - q) / n as f64).sqrt()))
            .collect(),
    });
    let out = DualCheckOutcome { samples: n, marked_origin, e_q_d, e_q_a0, moment_identity_gap, invariant_law, kernel_rows };
    let report = rb.finish(&out);
    Ok((out, report))
}

fn drop_empty_bins(counts: &[u64], probs: &[f64]) -> (Vec<u64>, Vec<f64>) {
    counts.iter().zip(probs).filter(|(_, &p)| p > 0.0).map(|(&c, &p)| (c, p)).unzip()
}
