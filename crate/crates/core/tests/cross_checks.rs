//! Checks that tie independent routes to the same quantity together.

use rwsre::env::{dual_gap_kernel, gap_chain_state};
use rwsre::seed::{rng, Stream};
use rwsre::stats::{chi_square_gof, ks_two_sample};
use rwsre::walk::{direct_sigma_step, embedded_kernel, run_to_hit, sample_hitting_time, Stepper, DEFAULT_BUDGET};
use rwsre::{sample_dual, sample_environment, Dist, DualMode, EnvironmentSpec, GapLaw};

fn uniform_gaps() -> EnvironmentSpec {
    EnvironmentSpec::new(Dist::uniform_on(&[0.4, 0.75]), Dist::uniform_on(&[1.0, 2.0, 3.0, 5.0])).unwrap()
}

#[test]
fn direct_sigma_steps_follow_embedded_kernel() {
    let env = sample_environment(&uniform_gaps(), 11, 16).unwrap();
    let mut stepper = Stepper::new(&env, 0, 256);
    let mut r = rng(3, Stream::Aux(1), 0);
    for k in -2..=2 {
        let kern = embedded_kernel(&env, k);
        let mut counts = [0u64; 3];
        for _ in 0..20_000 {
            let (dk, _) = direct_sigma_step(&mut stepper, k, &mut r);
            counts[(dk + 1) as usize] += 1;
        }
        let t = chi_square_gof(&counts, &[kern.p_down, kern.p_stay, kern.p_up]).unwrap();
        assert!(t.p_value > 1e-3, "mark {k}: {counts:?} vs {kern:?}, p = {}", t.p_value);
    }
}

#[test]
fn branching_sampler_matches_direct_stepping() {
    let spec = EnvironmentSpec::new(Dist::xi_two_point(0.5, 0.7, 1.5), Dist::uniform_on(&[1.0, 3.0])).unwrap();
    let env = sample_environment(&spec, 4, 64).unwrap();
    let n = 40;
    let mut r1 = rng(8, Stream::Aux(2), 0);
    let mut r2 = rng(8, Stream::Aux(3), 0);
    let branch: Vec<f64> = (0..3000).map(|_| sample_hitting_time(&env, n, 100_000, &mut r1).unwrap() as f64).collect();
    let direct: Vec<f64> = (0..3000).map(|_| run_to_hit(&env, n, DEFAULT_BUDGET, &mut r2).time.unwrap() as f64).collect();
    let t = ks_two_sample(&branch, &direct).unwrap();
    assert!(t.p_value > 1e-3, "KS p = {}", t.p_value);
}

#[test]
fn dual_origin_and_gap_chain_are_stationary() {
    let spec = EnvironmentSpec::new(Dist::constant(2.0 / 3.0), Dist::uniform_on(&[1.0, 2.0, 3.0])).unwrap();
    let gap = &spec.gap_dist;
    let invariant: Vec<f64> = (0..3).map(|x| dual_gap_kernel(gap, x, 0).unwrap().invariant_mass).collect();
    assert!((invariant.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    // The chain law at any fixed site is the invariant law.
    for site in [0i64, 1, 7, -5] {
        let mut counts = [0u64; 3];
        for s in 0..20_000 {
            let (env, _) = sample_dual(&spec, s, 8, DualMode::Direct).unwrap();
            counts[gap_chain_state(&env, site) as usize] += 1;
        }
        let t = chi_square_gof(&counts, &invariant).unwrap();
        assert!(t.p_value > 1e-3, "site {site}: {counts:?}");
    }
    assert!((invariant[0] - 1.0 / gap.mean()).abs() < 1e-15);
}

#[test]
fn gap_chain_transitions_follow_kernel() {
    let spec = EnvironmentSpec::new(Dist::constant(0.6), Dist::table(&[1.0, 2.0, 4.0], &[0.5, 0.25, 0.25])).unwrap();
    let gap = &spec.gap_dist;
    let mut counts = [[0u64; 4]; 4];
    for s in 0..2_000 {
        let (env, _) = sample_dual(&spec, s, 8, DualMode::Direct).unwrap();
        for site in 0..60 {
            let (x, y) = (gap_chain_state(&env, site), gap_chain_state(&env, site + 1));
            counts[x as usize][y as usize] += 1;
        }
    }
    for x in 0..4u64 {
        let probs: Vec<f64> = (0..4).map(|y| dual_gap_kernel(gap, x, y).unwrap().transition).collect();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let support: Vec<usize> = (0..4).filter(|&y| probs[y] > 0.0).collect();
        let obs: Vec<u64> = support.iter().map(|&y| counts[x as usize][y]).collect();
        let p: Vec<f64> = support.iter().map(|&y| probs[y]).collect();
        let zero: u64 = (0..4).filter(|&y| probs[y] == 0.0).map(|y| counts[x as usize][y]).sum();
        assert_eq!(zero, 0, "impossible transition from {x}");
        if obs.len() > 1 {
            let t = chi_square_gof(&obs, &p).unwrap();
            assert!(t.p_value > 1e-3, "row {x}: {obs:?} vs {p:?}");
        }
    }
}

#[test]
fn importance_weights_reproduce_size_bias() {
    let spec = uniform_gaps();
    let mut w_sum = 0.0;
    let mut wd_sum = 0.0;
    for s in 0..40_000 {
        let (env, w) = sample_dual(&spec, s, 4, DualMode::Importance).unwrap();
        let d0 = (env.position(0) - env.position(-1)) as f64;
        w_sum += w.weight;
        wd_sum += w.weight * d0;
    }
    let e_q_d = spec.gap_dist.second_moment() / spec.gap_dist.mean();
    let est = wd_sum / w_sum;
    assert!((est - e_q_d).abs() < 0.05, "{est} vs {e_q_d}");
}
