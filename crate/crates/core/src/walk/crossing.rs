use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Exit probability at `side` of a simple symmetric walk on `{0, ..., l}` from `x`.
pub fn exit_probability(l: u64, x: u64, side: Side) -> f64 {
    let p_right = x as f64 / l as f64;
    match side {
        Side::Right => p_right,
        Side::Left => 1.0 - p_right,
    }
}

/// `E[T | exit at side]` for a simple symmetric walk on `{0, ..., l}` from
/// `x`: `(l^2 - x^2)/3` at the right end and `x(2l - x)/3` at the left end.
pub fn ssrw_conditional_exit_time(l: u64, x: u64, side: Side) -> Result<f64> {
    if l == 0 || x > l {
        return Err(Error::Domain(format!("start {x} outside {{0, ..., {l}}}")));
    }
    let (l, x) = (l as f64, x as f64);
    let t = match side {
        Side::Right if x > 0.0 => (l * l - x * x) / 3.0,
        Side::Left if x < l => x * (2.0 * l - x) / 3.0,
        _ => return Err(Error::Domain("exit at that side has probability zero".into())),
    };
    Ok(t)
}

/// Mean duration of a stretch crossing that starts with the step off a
/// marked site into a stretch of length `l`, landing at offset
/// `start_offset`, conditioned on leaving at `side`. Equals one (the entry
/// step) plus the symmetric-walk conditional exit time.
pub fn mean_crossing_time(l: u64, start_offset: u64, side: Side) -> Result<f64> {
    if start_offset == 0 {
        return Err(Error::Domain("a crossing starts one step inside the stretch".into()));
    }
    Ok(1.0 + ssrw_conditional_exit_time(l, start_offset, side)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// First-step analysis solved by Gaussian elimination on the interior:
    /// returns (P(exit right), E[T 1{right}], E[T 1{left}]) from every start.
    fn first_step_oracle(l: usize) -> Vec<(f64, f64, f64)> {
        let n = l - 1;
        let solve = |rhs: &dyn Fn(usize, &[f64]) -> f64, extra: &[f64]| -> Vec<f64> {
            // (I - P) v = rhs on interior points 1..l-1, tridiagonal.
            let mut a = vec![vec![0.0; n]; n];
            let mut b = vec![0.0; n];
            for i in 0..n {
                a[i][i] = 1.0;
                if i > 0 {
                    a[i][i - 1] = -0.5;
                }
                if i + 1 < n {
                    a[i][i + 1] = -0.5;
                }
                b[i] = rhs(i + 1, extra);
            }
            for c in 0..n {
                for r in c + 1..n {
                    let f = a[r][c] / a[c][c];
                    for k in c..n {
                        a[r][k] -= f * a[c][k];
                    }
                    b[r] -= f * b[c];
                }
            }
            let mut x = vec![0.0; n];
            for r in (0..n).rev() {
                let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
                x[r] = (b[r] - s) / a[r][r];
            }
            x
        };
        // h(x) = P(right): h = 1/2 h(x-1) + 1/2 h(x+1), h(l) = 1.
        let h = solve(&|i, _| if i == l - 1 { 0.5 } else { 0.0 }, &[]);
        let hv = |i: usize| if i == 0 { 0.0 } else if i == l { 1.0 } else { h[i - 1] };
        // g(x) = E[T 1{right}] satisfies g = h + avg of neighbours.
        let g: Vec<f64> = solve(&|i, _| hv(i), &[]);
        let hl = |i: usize| 1.0 - hv(i);
        let f: Vec<f64> = solve(&|i, _| hl(i), &[]);
        (1..l).map(|i| (hv(i), g[i - 1], f[i - 1])).collect()
    }

    #[test]
    fn closed_forms_match_first_step_analysis() {
        for l in 2..=6u64 {
            let oracle = first_step_oracle(l as usize);
            for x in 1..l {
                let (p, g, f) = oracle[(x - 1) as usize];
                assert!((exit_probability(l, x, Side::Right) - p).abs() < 1e-12);
                let tr = ssrw_conditional_exit_time(l, x, Side::Right).unwrap();
                let tl = ssrw_conditional_exit_time(l, x, Side::Left).unwrap();
                assert!((tr * p - g).abs() < 1e-12, "L={l} x={x}");
                assert!((tl * (1.0 - p) - f).abs() < 1e-12, "L={l} x={x}");
                let total = p * tr + (1.0 - p) * tl;
                assert!((total - (x * (l - x)) as f64).abs() < 1e-12);
                let with_entry = p * mean_crossing_time(l, x, Side::Right).unwrap()
                    + (1.0 - p) * mean_crossing_time(l, x, Side::Left).unwrap();
                assert!((with_entry - (1 + x * (l - x)) as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_geometries() {
        assert_eq!(mean_crossing_time(1, 1, Side::Right).unwrap(), 1.0);
        assert_eq!(mean_crossing_time(2, 1, Side::Right).unwrap(), 2.0);
        assert_eq!(mean_crossing_time(2, 1, Side::Left).unwrap(), 2.0);
        assert!(mean_crossing_time(1, 1, Side::Left).is_err());
        assert!(mean_crossing_time(3, 0, Side::Left).is_err());
        assert!(mean_crossing_time(3, 4, Side::Left).is_err());
    }
}
