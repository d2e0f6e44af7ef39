use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::report::ExperimentReport;
use crate::CliError;

/// Writes `<command>.json`, `<command>.csv` (when there are per-replica
/// rows) and one `<command>_<series>.tsv` per plot series into `dir`.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let stem = report.command.replace('-', "_");
    let json = serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
    fs::write(dir.join(format!("{stem}.json")), json)?;
    if !report.records.is_empty() {
        let mut w = csv::Writer::from_path(dir.join(format!("{stem}.csv"))).map_err(|e| CliError::Output(e.to_string()))?;
        w.write_record(&report.records.columns).map_err(|e| CliError::Output(e.to_string()))?;
        for row in &report.records.rows {
            w.write_record(row.iter().map(cell)).map_err(|e| CliError::Output(e.to_string()))?;
        }
        w.flush()?;
    }
    for s in &report.plots {
        let mut text = format!("# {}\t{}\t{}_err\n", s.x_label, s.y_label, s.y_label);
        for (x, y, e) in &s.points {
            text.push_str(&format!("{x}\t{y}\t{e}\n"));
        }
        fs::write(dir.join(format!("{stem}_{}.tsv", s.name)), text)?;
    }
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
