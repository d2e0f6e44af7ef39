use rand::Rng;
use rand_distr::{Distribution, Gamma, Geometric, Poisson};

use crate::env::SparseEnvironment;
use crate::error::{Error, Result};

/// Failures before the `m`-th success in Bernoulli(`p`) trials.
pub fn negative_binomial<R: Rng + ?Sized>(m: u64, p: f64, rng: &mut R) -> u64 {
    if m == 0 {
        return 0;
    }
    if m <= 32 {
        let g = Geometric::new(p).expect("p in (0, 1)");
        return (0..m).map(|_| g.sample(rng)).sum();
    }
    // Gamma-Poisson mixture.
    let lambda = Gamma::new(m as f64, (1.0 - p) / p).expect("positive shape").sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    match Poisson::new(lambda) {
        Ok(pois) => {
            let x: f64 = pois.sample(rng);
            x as u64
        }
        Err(_) => lambda.round() as u64,
    }
}

/// Samples `T_n` (first passage from 0 to `n > 0`) exactly in law.
///
/// With `U_j` the number of left steps taken from site `j` before `T_n`,
/// `U_{n-1}` is geometric and, walking down,
/// `U_{j-1} ~ NegBin(U_j + 1{j-1 >= 0}, omega_{j-1})`;
/// `T_n = n + 2 sum_j U_j`. The recursion stops at the first negative site
/// with `U_j = 0`, or errors once `max_left_sites` sites below 0 are used.
pub fn sample_hitting_time<R: Rng + ?Sized>(env: &SparseEnvironment, n: i64, max_left_sites: i64, rng: &mut R) -> Result<u64> {
    if n <= 0 {
        return Err(Error::Domain(format!("branching sampler needs a target n > 0, got {n}")));
    }
    let lo = -max_left_sites;
    let omega = env.omega_table(lo, n - 1);
    let at = |j: i64| omega[(j - lo) as usize];
    let mut u = negative_binomial(1, at(n - 1), rng);
    let mut total: u64 = u;
    let mut j = n - 1;
    while j > 0 || (j > lo && u > 0) {
        let m = u + u64::from(j > 0);
        u = negative_binomial(m, at(j - 1), rng);
        total = total.saturating_add(u);
        j -= 1;
    }
    if j == lo && u > 0 {
        return Err(Error::BudgetExhausted(format!(
            "left excursions below -{max_left_sites} while sampling T_{n}"
        )));
    }
    Ok((n as u64).saturating_add(total.saturating_mul(2)))
}
