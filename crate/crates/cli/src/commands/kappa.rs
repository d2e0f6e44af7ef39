use rwsre::analysis::kappa_root;
use rwsre::{Dist, EnvironmentSpec};
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{ExperimentReport, ReportBuilder, Verdict};
use crate::CliResult;

const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct KappaOutcome {
    pub kappa: f64,
    /// `E xi^kappa - 1`.
    pub residual: f64,
    /// The root recomputed with the gap law replaced.
    pub with_other_gaps: Vec<(String, f64)>,
}

pub fn cmd_kappa(config: &RunConfig) -> CliResult<ExperimentReport> {
    run_kappa(config).map(|(_, r)| r)
}

pub fn run_kappa(config: &RunConfig) -> CliResult<(KappaOutcome, ExperimentReport)> {
    let spec = config.effective_spec()?;
    let mut rb = ReportBuilder::new("kappa", config);
    let kappa = kappa_root(&spec)?;
    let residual = spec.expect_xi(|x| x.powf(kappa))? - 1.0;
    rb.verdict(Verdict::hard("E xi^kappa = 1", residual.abs() <= ROOT_TOL, format!("residual {residual:.3e}")));
    let gaps = [("d=1", Dist::constant(1.0)), ("d=2", Dist::constant(2.0)), ("d in {1,2}", Dist::uniform_on(&[1.0, 2.0]))];
    let mut with_other_gaps = Vec::new();
    for (name, gap) in gaps {
        let alt = EnvironmentSpec { gap_dist: gap, ..spec.clone() };
        with_other_gaps.push((name.to_string(), kappa_root(&alt)?));
    }
    let spread = with_other_gaps.iter().map(|(_, k)| (k - kappa).abs()).fold(0.0, f64::max);
    rb.verdict(Verdict::hard("kappa ignores the gap law", spread <= ROOT_TOL, format!("max deviation {spread:.3e}")));
    let out = KappaOutcome { kappa, residual, with_other_gaps };
    let report = rb.finish(&out);
    Ok((out, report))
}
