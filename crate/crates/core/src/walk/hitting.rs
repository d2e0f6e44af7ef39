use rand::RngCore;
use serde::Serialize;

use super::Stepper;
use crate::env::SparseEnvironment;

/// Default step budget for a single first-passage run.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Outcome of a first-passage run from the origin. `time` is `None` on TIMEOUT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HittingRecord {
    pub target: i64,
    pub time: Option<u64>,
    pub steps_used: u64,
}

impl HittingRecord {
    pub fn is_timeout(&self) -> bool {
        self.time.is_none()
    }
}

/// First passage to `target` from 0 by direct stepping.
pub fn run_to_hit<R: RngCore + ?Sized>(env: &SparseEnvironment, target: i64, budget: u64, rng: &mut R) -> HittingRecord {
    let mut s = Stepper::new(env, 0, target.abs() + 64);
    run_to_hit_with(&mut s, target, budget, rng)
}

/// As [`run_to_hit`], reusing a stepper's table.
pub fn run_to_hit_with<R: RngCore + ?Sized>(stepper: &mut Stepper<'_>, target: i64, budget: u64, rng: &mut R) -> HittingRecord {
    let (_, steps, hit) = stepper.run_until(0, target, budget, rng);
    HittingRecord { target, time: hit.then_some(steps), steps_used: steps }
}

/// Row of a hitting-time dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HittingRow {
    pub env_seed: u64,
    pub walk_seed: u64,
    pub target: i64,
    #[serde(rename = "T")]
    pub time: Option<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{sample_environment, Dist, EnvironmentSpec};
    use crate::seed::{rng, Stream};

    #[test]
    fn target_zero_is_immediate() {
        let env = sample_environment(&EnvironmentSpec::new(Dist::constant(0.6), Dist::constant(2.0)).unwrap(), 0, 4).unwrap();
        let mut r = rng(0, Stream::Aux(0), 0);
        let rec = run_to_hit(&env, 0, 10, &mut r);
        assert_eq!(rec.time, Some(0));
    }

    #[test]
    fn deterministic_and_timeouts_reported() {
        let env = sample_environment(&EnvironmentSpec::new(Dist::constant(0.3), Dist::constant(1.0)).unwrap(), 0, 4).unwrap();
        let a = run_to_hit(&env, 50, 10_000, &mut rng(5, Stream::ReplicaWalk, 0));
        let b = run_to_hit(&env, 50, 10_000, &mut rng(5, Stream::ReplicaWalk, 0));
        assert_eq!(a, b);
        assert!(a.is_timeout());
        assert_eq!(a.steps_used, 10_000);
    }

    #[test]
    fn symmetric_exit_side_is_fair() {
        let env = sample_environment(&EnvironmentSpec::new(Dist::constant(0.5), Dist::constant(1.0)).unwrap(), 0, 4).unwrap();
        let mut s = Stepper::new(&env, 0, 64);
        let mut r = rng(6, Stream::Aux(0), 0);
        let n = 10_000;
        let mut right = 0;
        for _ in 0..n {
            let (end, _) = s.run_until_either(0, -10, 10, &mut r);
            if end == 10 {
                right += 1;
            }
        }
        let p = right as f64 / n as f64;
        assert!((p - 0.5).abs() < 4.0 * (0.25f64 / n as f64).sqrt());
    }
}
