use std::marker::PhantomData;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::crossing::{mean_crossing_time, Side};
use super::Stepper;
use crate::env::{sample_environment, EnvironmentSpec, SparseEnvironment};
use crate::error::{Error, Result};
use crate::seed::{replica_seeds, rng, Stream};
use crate::stats::mean_stderr;

/// Marker: estimate built from exactly simulated paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactPath;

/// Marker: estimate built with mean crossing durations. Valid for the speed
/// only; per-replica path data is deliberately not exposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeanTimeOnly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedMode {
    Direct,
    EmbeddedMeanTime,
}

/// Mean and standard error of `X_horizon / horizon` across environments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedEstimate<M = ExactPath> {
    pub mean: f64,
    pub stderr: f64,
    pub n_replicas: usize,
    pub horizon: u64,
    #[serde(skip)]
    velocities: Vec<f64>,
    #[serde(skip)]
    marker: PhantomData<M>,
}

impl<M> SpeedEstimate<M> {
    fn from_velocities(velocities: Vec<f64>, horizon: u64) -> Self {
        let (mean, stderr) = mean_stderr(&velocities);
        SpeedEstimate { mean, stderr, n_replicas: velocities.len(), horizon, velocities, marker: PhantomData }
    }

    /// Drops the marker, keeping only the aggregate.
    pub fn summary(&self) -> SpeedSummary {
        SpeedSummary { mean: self.mean, stderr: self.stderr, n_replicas: self.n_replicas, horizon: self.horizon }
    }
}

impl SpeedEstimate<ExactPath> {
    /// Per-replica `X_horizon / horizon`, in replica order.
    pub fn replica_velocities(&self) -> &[f64] {
        &self.velocities
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedSummary {
    pub mean: f64,
    pub stderr: f64,
    pub n_replicas: usize,
    pub horizon: u64,
}

const MIN_HORIZON: u64 = 10_000;

fn check(n_envs: usize, horizon: u64) -> Result<()> {
    if horizon < MIN_HORIZON {
        return Err(Error::Config(format!("speed horizon {horizon} is below {MIN_HORIZON}")));
    }
    if n_envs < 2 {
        return Err(Error::Config("speed estimation needs at least 2 environments".into()));
    }
    Ok(())
}

/// Velocity of one replica by direct stepping.
pub fn direct_velocity(env: &SparseEnvironment, horizon: u64, walk_seed: u64) -> f64 {
    let mut s = Stepper::new(env, 0, 4096);
    let mut r = rng(walk_seed, Stream::ReplicaWalk, 0);
    s.run(0, horizon, &mut r) as f64 / horizon as f64
}

/// Velocity of one replica from the marked-site chain with mean crossing
/// durations: position `a_k` at the first sigma-step whose accumulated
/// mean time reaches `horizon`.
pub fn mean_time_velocity(env: &SparseEnvironment, horizon: u64, walk_seed: u64) -> f64 {
    let mut r = rng(walk_seed, Stream::ReplicaWalk, 0);
    let mut k = 0i64;
    let mut t = 0.0;
    let h = horizon as f64;
    let mut here = env.mark(0);
    let mut up = env.mark(1);
    let mut down = env.mark(-1);
    while t < h {
        let go_up = r.random::<f64>() < here.lambda;
        let l = if go_up { up.position - here.position } else { here.position - down.position } as u64;
        let crosses = l == 1 || r.random::<f64>() < 1.0 / l as f64;
        // Crossing frame: departure mark at 0, far mark at l, entry lands on 1.
        let side = if crosses { Side::Right } else { Side::Left };
        t += mean_crossing_time(l, 1, side).expect("valid geometry");
        if crosses {
            if go_up {
                k += 1;
                down = here;
                here = up;
                up = env.mark(k + 1);
            } else {
                k -= 1;
                up = here;
                here = down;
                down = env.mark(k - 1);
            }
        }
    }
    here.position as f64 / h
}

pub fn estimate_speed_direct(spec: &EnvironmentSpec, n_envs: usize, horizon: u64, master_seed: u64) -> Result<SpeedEstimate<ExactPath>> {
    check(n_envs, horizon)?;
    let v = replicate(spec, n_envs, master_seed, |env, ws| direct_velocity(env, horizon, ws))?;
    Ok(SpeedEstimate::from_velocities(v, horizon))
}

pub fn estimate_speed_mean_time(spec: &EnvironmentSpec, n_envs: usize, horizon: u64, master_seed: u64) -> Result<SpeedEstimate<MeanTimeOnly>> {
    check(n_envs, horizon)?;
    let v = replicate(spec, n_envs, master_seed, |env, ws| mean_time_velocity(env, horizon, ws))?;
    Ok(SpeedEstimate::from_velocities(v, horizon))
}

/// Mode-erased entry point; only the aggregate survives.
pub fn estimate_speed(spec: &EnvironmentSpec, n_envs: usize, horizon: u64, mode: SpeedMode, master_seed: u64) -> Result<SpeedSummary> {
    Ok(match mode {
        SpeedMode::Direct => estimate_speed_direct(spec, n_envs, horizon, master_seed)?.summary(),
        SpeedMode::EmbeddedMeanTime => estimate_speed_mean_time(spec, n_envs, horizon, master_seed)?.summary(),
    })
}

/// Runs `f` on replica environments in parallel; output is in replica order.
fn replicate<F>(spec: &EnvironmentSpec, n: usize, master_seed: u64, f: F) -> Result<Vec<f64>>
where
    F: Fn(&SparseEnvironment, u64) -> f64 + Sync,
{
    spec.validate()?;
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let (es, ws) = replica_seeds(master_seed, i);
            let env = sample_environment(spec, es, 64)?;
            Ok(f(&env, ws))
        })
        .collect()
}
