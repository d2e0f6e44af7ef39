use std::f64::consts::PI;

use libm::erfc;

const TERM_TOL: f64 = 1e-14;

fn c(k: usize) -> f64 {
    let m = (2 * k + 1) as f64;
    m * m * PI * PI / 8.0
}

/// Density of the limit of `sigma^2 X_n / (log n)^2` for the recurrent walk:
/// `(2/pi) sum_k (-1)^k / (2k+1) exp(-(2k+1)^2 pi^2 |x| / 8)`.
///
/// For `|x| < 1` the equivalent theta-transformed series
/// `1/2 - sum_k (-1)^k erfc((2k+1) / sqrt(2|x|))` is summed instead; it
/// converges at once near 0, where the first form is only conditionally
/// convergent. Both stop at the first term below `1e-14`.
pub fn sinai_density(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        if a == 0.0 {
            return 0.5;
        }
        let z = (2.0 * a).sqrt();
        let mut s = 0.5;
        for k in 0.. {
            let term = erfc((2 * k + 1) as f64 / z);
            if term < TERM_TOL {
                break;
            }
            s += if k % 2 == 0 { -term } else { term };
        }
        s
    } else {
        let mut s = 0.0;
        for k in 0.. {
            let term = (-c(k) * a).exp() / (2 * k + 1) as f64;
            if term < TERM_TOL {
                break;
            }
            s += if k % 2 == 0 { term } else { -term };
        }
        2.0 / PI * s
    }
}

/// CDF of [`sinai_density`]:
/// `1/2 + sign(x) (2/pi) sum_k (-1)^k (1 - e^{-c_k |x|}) / ((2k+1) c_k)`.
pub fn sinai_cdf(x: f64) -> f64 {
    let a = x.abs();
    // sum_k (-1)^k / ((2k+1) c_k) = (8/pi^2)(pi^3/32) = pi/4, so for |x| away
    // from 0 only the exponentially small part needs summing.
    let mut s = 0.0;
    if a >= 0.05 {
        for k in 0.. {
            let term = (-c(k) * a).exp() / ((2 * k + 1) as f64 * c(k));
            if term < TERM_TOL * 1e-2 {
                break;
            }
            s += if k % 2 == 0 { term } else { -term };
        }
        let half = 2.0 / PI * (PI / 4.0 - s);
        return 0.5 + x.signum() * half;
    }
    for k in 0..200_000 {
        let term = -(-c(k) * a).exp_m1() / ((2 * k + 1) as f64 * c(k));
        s += if k % 2 == 0 { term } else { -term };
    }
    0.5 + x.signum() * 2.0 / PI * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadConfig};

    fn original_series(x: f64, terms: usize) -> f64 {
        2.0 / PI * (0..terms).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * (-c(k) * x.abs()).exp() / (2 * k + 1) as f64).sum::<f64>()
    }

    #[test]
    fn forms_agree_where_both_converge() {
        for i in 1..=40 {
            let x = i as f64 * 0.05;
            assert!((sinai_density(x) - original_series(x, 400)).abs() < 1e-13, "x={x}: {} vs {}", sinai_density(x), original_series(x, 400));
        }
    }

    #[test]
    fn value_at_zero_and_symmetry() {
        assert!((sinai_density(0.0) - 0.5).abs() < 1e-10);
        assert!((sinai_density(1e-9) - 0.5).abs() < 1e-10);
        for i in 0..200 {
            let x = i as f64 * 0.037;
            assert_eq!(sinai_density(x), sinai_density(-x));
        }
    }

    #[test]
    fn unit_mass() {
        // Termwise: (32 / pi^3) sum (-1)^k / (2k+1)^3 = 1.
        let termwise: f64 = 32.0 / PI.powi(3) * (0..100_000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / ((2 * k + 1) as f64).powi(3)).sum::<f64>();
        assert!((termwise - 1.0).abs() < 1e-12);
        let cfg = QuadConfig { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 };
        let inner = integrate(sinai_density, 0.0, 1.0, cfg).unwrap().value;
        let outer = integrate(sinai_density, 1.0, 40.0, cfg).unwrap().value;
        assert!((2.0 * (inner + outer) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unimodal_and_cdf_consistent() {
        let mut prev = sinai_density(0.0);
        for i in 1..400 {
            let d = sinai_density(i as f64 * 0.02);
            assert!(d <= prev);
            prev = d;
        }
        assert_eq!(sinai_cdf(0.0), 0.5);
        let cfg = QuadConfig::default();
        for x in [0.01, 0.04, 0.3, 1.0, 2.5] {
            let q = integrate(sinai_density, 0.0, x, cfg).unwrap().value;
            assert!((sinai_cdf(x) - 0.5 - q).abs() < 1e-9, "x={x}");
            assert!((sinai_cdf(-x) + sinai_cdf(x) - 1.0).abs() < 1e-14);
        }
        assert!((sinai_cdf(30.0) - 1.0).abs() < 1e-14);
    }
}
