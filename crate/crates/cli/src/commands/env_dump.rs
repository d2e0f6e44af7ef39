use rwsre::sample_environment;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{ExperimentReport, ReportBuilder, Table};
use crate::CliResult;

/// Marks `-dump_marks..=dump_marks` of the environment drawn from the master seed.
pub fn cmd_env_dump(config: &RunConfig) -> CliResult<ExperimentReport> {
    let spec = config.effective_spec()?;
    let mut rb = ReportBuilder::new("env-dump", config);
    let m = config.run.dump_marks.max(0);
    let env = sample_environment(&spec, config.master_seed, m as usize + 1)?;
    let mut t = Table::new(&["k", "a_k", "lambda_k", "d_k"]);
    for row in env.rows(-m, m) {
        t.push(vec![json!(row.k), json!(row.a_k), json!(row.lambda_k), json!(row.d_k)]);
    }
    rb.records = t;
    Ok(rb.finish(&json!({ "marks": 2 * m + 1, "env_seed": config.master_seed })))
}
