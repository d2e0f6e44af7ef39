use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

/// A named pass/fail check. Soft checks are reported but never fail a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub hard: bool,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn hard(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Verdict { name: name.into(), hard: true, passed, detail: detail.into() }
    }

    pub fn soft(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Verdict { name: name.into(), hard: false, passed, detail: detail.into() }
    }
}

/// Per-replica rows, written as CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// `(x, y, yerr)` points of one figure, written as TSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotSeries {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub command: String,
    pub config: RunConfig,
    pub aggregates: Value,
    pub records: Table,
    pub plots: Vec<PlotSeries>,
    pub verdicts: Vec<Verdict>,
    pub walk_steps: u64,
    pub wall_clock_s: f64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| !v.hard || v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Accumulates the pieces of a report while a command runs.
pub struct ReportBuilder {
    command: &'static str,
    config: RunConfig,
    started: Instant,
    pub records: Table,
    pub plots: Vec<PlotSeries>,
    pub verdicts: Vec<Verdict>,
    pub walk_steps: u64,
}

impl ReportBuilder {
    pub fn new(command: &'static str, config: &RunConfig) -> Self {
        ReportBuilder {
            command,
            config: config.clone(),
            started: Instant::now(),
            records: Table::default(),
            plots: Vec::new(),
            verdicts: Vec::new(),
            walk_steps: 0,
        }
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn finish<T: Serialize>(self, aggregates: &T) -> ExperimentReport {
        ExperimentReport {
            command: self.command.to_string(),
            config: self.config,
            aggregates: serde_json::to_value(aggregates).expect("aggregates serialize"),
            records: self.records,
            plots: self.plots,
            verdicts: self.verdicts,
            walk_steps: self.walk_steps,
            wall_clock_s: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// `|a - b| <= width * sqrt(se_a^2 + se_b^2)`, with a rounding floor so two
/// exact values still agree.
pub fn agree(a: (f64, f64), b: (f64, f64), width: f64) -> bool {
    let floor = 64.0 * f64::EPSILON * a.0.abs().max(b.0.abs()).max(1.0);
    (a.0 - b.0).abs() <= width * (a.1 * a.1 + b.1 * b.1).sqrt() + floor
}
