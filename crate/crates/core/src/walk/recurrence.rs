use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::Stepper;
use crate::env::{sample_environment, EnvironmentSpec};
use crate::error::Result;
use crate::seed::{replica_seeds, rng, Stream};
use crate::stats::quantile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceRecord {
    pub env_seed: u64,
    pub walk_seed: u64,
    pub sign_changes: u64,
    pub max: i64,
    pub min: i64,
    pub returns: u64,
    pub final_position: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub horizon: u64,
    pub records: Vec<RecurrenceRecord>,
    pub median_sign_changes: f64,
    pub median_max: f64,
    pub median_min: f64,
    pub median_returns: f64,
    /// Fraction of replicas that revisit 0 at least once.
    pub fraction_returned: f64,
}

/// Tracks excursion statistics of one trajectory of `horizon` steps.
pub fn track<R: RngCore + ?Sized>(stepper: &mut Stepper<'_>, horizon: u64, rng: &mut R) -> (u64, i64, i64, u64, i64) {
    let (mut x, mut max, mut min) = (0i64, 0i64, 0i64);
    let (mut changes, mut returns) = (0u64, 0u64);
    let mut last_sign = 0i64;
    for _ in 0..horizon {
        x = stepper.step(x, rng);
        max = max.max(x);
        min = min.min(x);
        let s = x.signum();
        if s == 0 {
            returns += 1;
        } else {
            if last_sign != 0 && s != last_sign {
                changes += 1;
            }
            last_sign = s;
        }
    }
    (changes, max, min, returns, x)
}

pub fn recurrence_diagnostic(spec: &EnvironmentSpec, horizon: u64, reps: usize, master_seed: u64) -> Result<RecurrenceReport> {
    spec.validate()?;
    let records: Vec<RecurrenceRecord> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let (env_seed, walk_seed) = replica_seeds(master_seed, i);
            let env = sample_environment(spec, env_seed, 64)?;
            let mut s = Stepper::new(&env, 0, 4096);
            let mut r = rng(walk_seed, Stream::ReplicaWalk, 0);
            let (sign_changes, max, min, returns, final_position) = track(&mut s, horizon, &mut r);
            Ok(RecurrenceRecord { env_seed, walk_seed, sign_changes, max, min, returns, final_position })
        })
        .collect::<Result<_>>()?;
    let med = |f: &dyn Fn(&RecurrenceRecord) -> f64| {
        let v: Vec<f64> = records.iter().map(f).collect();
        quantile(&v, 0.5)
    };
    Ok(RecurrenceReport {
        horizon,
        median_sign_changes: med(&|r| r.sign_changes as f64),
        median_max: med(&|r| r.max as f64),
        median_min: med(&|r| r.min as f64),
        median_returns: med(&|r| r.returns as f64),
        fraction_returned: records.iter().filter(|r| r.returns > 0).count() as f64 / records.len().max(1) as f64,
        records,
    })
}
