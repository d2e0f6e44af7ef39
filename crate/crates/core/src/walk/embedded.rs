use rand::{Rng, RngCore};
use serde::Serialize;

use super::Stepper;
use crate::env::SparseEnvironment;

/// One row of the marked-site chain kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddedKernel {
    pub p_up: f64,
    pub p_down: f64,
    pub p_stay: f64,
}

/// Kernel of the chain of successive marked-site visits at mark `k`.
///
/// Leaving `a_k` to the right (probability `lambda_k`), the walk crosses the
/// stretch of length `L+` before returning with probability `1/L+`; the
/// left side is symmetric with `1 - lambda_k` and `L-`.
pub fn embedded_kernel(env: &SparseEnvironment, k: i64) -> EmbeddedKernel {
    let lambda = env.lambda(k);
    let l_up = (env.position(k + 1) - env.position(k)) as f64;
    let l_down = (env.position(k) - env.position(k - 1)) as f64;
    let p_up = lambda / l_up;
    let p_down = (1.0 - lambda) / l_down;
    EmbeddedKernel { p_up, p_down, p_stay: 1.0 - p_up - p_down }
}

/// Current mark index and number of marked-site visits so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmbeddedState {
    pub k: i64,
    pub sigma_time: u64,
}

pub fn embedded_step<R: Rng + ?Sized>(env: &SparseEnvironment, state: EmbeddedState, rng: &mut R) -> EmbeddedState {
    let kern = embedded_kernel(env, state.k);
    let u: f64 = rng.random();
    let dk = if u < kern.p_up {
        1
    } else if u < kern.p_up + kern.p_down {
        -1
    } else {
        0
    };
    EmbeddedState { k: state.k + dk, sigma_time: state.sigma_time + 1 }
}

/// One marked-site transition of the direct walk: steps from `a_k` until the
/// next visit to a marked site. Returns the index change and the step count.
pub fn direct_sigma_step<R: RngCore + ?Sized>(stepper: &mut Stepper<'_>, k: i64, rng: &mut R) -> (i64, u64) {
    let env = stepper.env();
    let (lo, here, hi) = (env.position(k - 1), env.position(k), env.position(k + 1));
    let first = stepper.step(here, rng);
    if first == lo || first == hi {
        return (if first == hi { 1 } else { -1 }, 1);
    }
    let (end, t) = if first > here {
        stepper.run_until_either(first, here, hi, rng)
    } else {
        stepper.run_until_either(first, lo, here, rng)
    };
    let dk = if end == hi {
        1
    } else if end == lo {
        -1
    } else {
        0
    };
    (dk, t + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{sample_environment, Dist, EnvironmentSpec};
    use crate::seed::{rng, Stream};

    #[test]
    fn classical_kernel() {
        let env = sample_environment(&EnvironmentSpec::new(Dist::constant(0.7), Dist::constant(1.0)).unwrap(), 0, 4).unwrap();
        let k = embedded_kernel(&env, 0);
        assert_eq!((k.p_up, k.p_down), (0.7, 1.0 - 0.7));
        assert!(k.p_stay.abs() < 1e-15);
    }

    #[test]
    fn symmetric_kernel() {
        let env = sample_environment(&EnvironmentSpec::new(Dist::constant(0.5), Dist::constant(4.0)).unwrap(), 0, 4).unwrap();
        let k = embedded_kernel(&env, 3);
        assert_eq!((k.p_up, k.p_down, k.p_stay), (0.125, 0.125, 0.75));
    }

    #[test]
    fn rows_sum_to_one() {
        let spec = EnvironmentSpec::new(Dist::two_point(0.2, 0.5, 0.9), Dist::uniform_on(&[1.0, 2.0, 7.0])).unwrap();
        let env = sample_environment(&spec, 3, 50).unwrap();
        for k in -50..50 {
            let r = embedded_kernel(&env, k);
            assert!((r.p_up + r.p_down + r.p_stay - 1.0).abs() <= 1e-15);
            assert!(r.p_up >= 0.0 && r.p_down >= 0.0 && r.p_stay >= 0.0);
        }
    }

    /// Stretch geometry L+ = 3, L- = 1, lambda = 2/3 simulated by brute force.
    #[test]
    fn gamblers_ruin_oracle() {
        let spec = EnvironmentSpec::new(Dist::constant(2.0 / 3.0), Dist::uniform_on(&[1.0, 3.0])).unwrap();
        let env = (0..200)
            .map(|s| sample_environment(&spec, s, 4).unwrap())
            .find(|e| e.gap(0) == 1 && e.gap(1) == 3)
            .expect("geometry occurs");
        let kern = embedded_kernel(&env, 0);
        assert!((kern.p_up - 2.0 / 9.0).abs() < 1e-15);
        assert!((kern.p_down - 1.0 / 3.0).abs() < 1e-15);
        assert!((kern.p_stay - 4.0 / 9.0).abs() < 1e-15);
        let mut s = Stepper::new(&env, 0, 64);
        let mut r = rng(7, Stream::Aux(0), 0);
        let n = 200_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let (dk, _) = direct_sigma_step(&mut s, 0, &mut r);
            counts[(dk + 1) as usize] += 1;
        }
        for (c, p) in counts.iter().zip([kern.p_down, kern.p_stay, kern.p_up]) {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn dense_marking_chain_is_the_walk() {
        let env = sample_environment(&EnvironmentSpec::new(Dist::two_point(0.3, 0.5, 0.8), Dist::constant(1.0)).unwrap(), 1, 4).unwrap();
        let mut s = Stepper::new(&env, 0, 64);
        let mut r = rng(8, Stream::Aux(0), 0);
        for k in -3..3 {
            let (dk, t) = direct_sigma_step(&mut s, k, &mut r);
            assert_eq!(t, 1);
            assert!(dk == 1 || dk == -1);
            assert!(embedded_kernel(&env, k).p_stay.abs() < 1e-15);
        }
    }
}
