use crate::env::EnvironmentSpec;
use crate::error::{Error, Result};

/// Positive root of `E xi^kappa = 1`.
///
/// `kappa -> E xi^kappa` is convex with value 1 and slope `E log xi < 0` at
/// 0, so a positive root exists iff `P(xi > 1) > 0`, and it is unique.
pub fn kappa_root(spec: &EnvironmentSpec) -> Result<f64> {
    let e_log = spec.expect_xi(f64::ln)?;
    if e_log >= 0.0 {
        return Err(Error::WrongRegime(format!("kappa needs E log xi < 0, got {e_log}")));
    }
    if spec.xi_max() <= 1.0 {
        return Err(Error::NoFiniteKappa);
    }
    let g = |k: f64| spec.expect_xi(|x| x.powf(k)).map(|m| m - 1.0);
    let (mut lo, mut hi) = (0.5, 1.0);
    while g(hi)? <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numeric { routine: "kappa_root", detail: "no sign change below 1e6".into() });
        }
    }
    while g(lo)? >= 0.0 {
        hi = lo;
        lo /= 2.0;
        if lo < 1e-12 {
            return Err(Error::Numeric { routine: "kappa_root", detail: "no sign change above 1e-12".into() });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (glo, ghi) = (g(lo)?.abs(), g(hi)?.abs());
    let (k, resid) = if glo <= ghi { (lo, glo) } else { (hi, ghi) };
    if resid >= 1e-12 {
        return Err(Error::Numeric { routine: "kappa_root", detail: format!("residual {resid:e} at kappa = {k}") });
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Dist;

    fn spec(xi1: f64, p1: f64, xi2: f64, gap: Dist) -> EnvironmentSpec {
        EnvironmentSpec::new(Dist::xi_two_point(xi1, p1, xi2), gap).unwrap()
    }

    #[test]
    fn two_point_roots() {
        // y = 2^kappa solves y^2 - 3y + 2 = 0: y = 2.
        let k1 = kappa_root(&spec(2.0, 1.0 / 3.0, 0.5, Dist::constant(1.0))).unwrap();
        assert!((k1 - 1.0).abs() < 1e-10);
        let k2 = kappa_root(&spec(4.0, 1.0 / 3.0, 0.25, Dist::constant(1.0))).unwrap();
        assert!((k2 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn errors() {
        let no_root = EnvironmentSpec::new(Dist::constant(2.0 / 3.0), Dist::constant(1.0)).unwrap();
        assert_eq!(kappa_root(&no_root), Err(Error::NoFiniteKappa));
        let rec = spec(2.0, 0.5, 0.5, Dist::constant(1.0));
        assert!(matches!(kappa_root(&rec), Err(Error::WrongRegime(_))));
    }

    #[test]
    fn gap_law_does_not_matter() {
        let gaps = [Dist::constant(1.0), Dist::constant(2.0), Dist::uniform_on(&[1.0, 2.0])];
        let ks: Vec<f64> = gaps.into_iter().map(|g| kappa_root(&spec(5.0 / 4.0, 0.5, 0.5, g)).unwrap()).collect();
        assert!(ks.iter().all(|k| (k - ks[0]).abs() <= 1e-12));
        assert!(ks[0] > 2.0);
    }

    #[test]
    fn continuous_bias_law() {
        let s = EnvironmentSpec::new(Dist::UniformInterval { lo: 0.35, hi: 0.9 }, Dist::constant(1.0)).unwrap();
        let k = kappa_root(&s).unwrap();
        let m = s.expect_xi(|x| x.powf(k)).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }
}
