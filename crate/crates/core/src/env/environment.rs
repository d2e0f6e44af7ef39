use std::fmt;
use std::sync::RwLock;

use serde::Serialize;

use super::{Dist, EnvironmentSpec};
use crate::error::Result;
use crate::seed::{rng, zigzag, Stream};

/// One marked site: `position = a_k + M`, bias `lambda_k`, and the gap
/// `d_k = a_k - a_{k-1}` to the previous mark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mark {
    pub index: i64,
    pub position: i64,
    pub lambda: f64,
    pub gap: u64,
}

impl Mark {
    pub fn xi(&self) -> f64 {
        (1.0 - self.lambda) / self.lambda
    }
}

/// Row of an environment dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvRow {
    pub k: i64,
    pub a_k: i64,
    pub lambda_k: f64,
    pub d_k: u64,
}

#[derive(Debug, Clone)]
struct Window {
    /// Marks 0, 1, 2, ...
    pos: Vec<Mark>,
    /// Marks -1, -2, ...
    neg: Vec<Mark>,
}

/// A lazily realized sparse environment.
///
/// The pair `(lambda_k, d_k)` is a pure function of `(seed, k)`, so the
/// window grows on demand without changing any value already observed.
/// Extension happens behind a lock; readers always see a consistent prefix.
pub struct SparseEnvironment {
    spec: EnvironmentSpec,
    seed: u64,
    shift: i64,
    window: RwLock<Window>,
}

impl fmt::Debug for SparseEnvironment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.window.read().expect("window lock");
        f.debug_struct("SparseEnvironment")
            .field("seed", &self.seed)
            .field("shift", &self.shift)
            .field("realized", &(-(w.neg.len() as i64), w.pos.len() as i64 - 1))
            .finish()
    }
}

impl Clone for SparseEnvironment {
    fn clone(&self) -> Self {
        SparseEnvironment {
            spec: self.spec.clone(),
            seed: self.seed,
            shift: self.shift,
            window: RwLock::new(self.window.read().expect("window lock").clone()),
        }
    }
}

/// Realizes a P-law environment with marks `-half_window..=half_window`.
pub fn sample_environment(spec: &EnvironmentSpec, seed: u64, half_window: usize) -> Result<SparseEnvironment> {
    spec.validate()?;
    let (lambda, gap) = draw_pair(spec, seed, 0);
    Ok(SparseEnvironment::build(spec.clone(), seed, lambda, gap, 0, half_window))
}

fn draw_pair(spec: &EnvironmentSpec, seed: u64, k: i64) -> (f64, u64) {
    let mut r = rng(seed, Stream::EnvPair, zigzag(k));
    let lambda = spec.lambda_dist.sample_lambda(&mut r);
    let gap = spec.gap_dist.sample_gap(&mut r);
    (lambda, gap)
}

impl SparseEnvironment {
    /// Environment whose mark 0 carries `(lambda0, d0)` and sits at `shift`.
    pub(crate) fn build(spec: EnvironmentSpec, seed: u64, lambda0: f64, d0: u64, shift: i64, half_window: usize) -> Self {
        let origin = Mark { index: 0, position: shift, lambda: lambda0, gap: d0 };
        let env = SparseEnvironment {
            spec,
            seed,
            shift,
            window: RwLock::new(Window { pos: vec![origin], neg: Vec::new() }),
        };
        {
            let mut w = env.window.write().expect("window lock");
            env.extend_marks(&mut w, -(half_window as i64), half_window as i64);
        }
        env
    }

    pub(crate) fn shifted(&self, shift: i64) -> Self {
        let mut w = self.window.read().expect("window lock").clone();
        let delta = shift - self.shift;
        for m in w.pos.iter_mut().chain(w.neg.iter_mut()) {
            m.position += delta;
        }
        SparseEnvironment { spec: self.spec.clone(), seed: self.seed, shift, window: RwLock::new(w) }
    }

    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Offset `M` of mark 0 from the origin.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// True iff site 0 is marked; mark -1 sits at `M - d_0 < 0`, so this is `M == 0`.
    pub fn origin_marked(&self) -> bool {
        self.shift == 0
    }

    /// Realized mark indices `(k_lo, k_hi)`.
    pub fn realized_range(&self) -> (i64, i64) {
        let w = self.window.read().expect("window lock");
        (-(w.neg.len() as i64), w.pos.len() as i64 - 1)
    }

    fn extend_marks(&self, w: &mut Window, k_lo: i64, k_hi: i64) {
        while (w.pos.len() as i64 - 1) < k_hi {
            let last = *w.pos.last().expect("mark 0 present");
            let k = last.index + 1;
            let (lambda, gap) = draw_pair(&self.spec, self.seed, k);
            w.pos.push(Mark { index: k, position: last.position.saturating_add(gap as i64), lambda, gap });
        }
        while -(w.neg.len() as i64) > k_lo {
            let prev = *w.neg.last().unwrap_or(&w.pos[0]);
            let k = prev.index - 1;
            let (lambda, gap) = draw_pair(&self.spec, self.seed, k);
            w.neg.push(Mark { index: k, position: prev.position.saturating_sub(prev.gap as i64), lambda, gap });
        }
    }

    fn extend_sites(&self, w: &mut Window, lo: i64, hi: i64) {
        while w.pos.last().expect("mark 0 present").position < hi {
            let n = w.pos.len() as i64;
            self.extend_marks(w, 0, n);
        }
        while w.neg.last().unwrap_or(&w.pos[0]).position > lo {
            let n = w.neg.len() as i64;
            self.extend_marks(w, -(n + 1), 0);
        }
    }

    fn covers_sites(w: &Window, lo: i64, hi: i64) -> bool {
        w.pos.last().expect("mark 0 present").position >= hi && w.neg.last().unwrap_or(&w.pos[0]).position <= lo
    }

    /// Runs `f` on a window covering sites `[lo, hi]`.
    fn with_sites<T>(&self, lo: i64, hi: i64, f: impl FnOnce(&Window) -> T) -> T {
        {
            let w = self.window.read().expect("window lock");
            if Self::covers_sites(&w, lo, hi) {
                return f(&w);
            }
        }
        let mut w = self.window.write().expect("window lock");
        self.extend_sites(&mut w, lo, hi);
        f(&w)
    }

    fn with_marks<T>(&self, k_lo: i64, k_hi: i64, f: impl FnOnce(&Window) -> T) -> T {
        {
            let w = self.window.read().expect("window lock");
            if -(w.neg.len() as i64) <= k_lo && (w.pos.len() as i64 - 1) >= k_hi {
                return f(&w);
            }
        }
        let mut w = self.window.write().expect("window lock");
        self.extend_marks(&mut w, k_lo, k_hi);
        f(&w)
    }

    /// Forces realization of marks `k_lo..=k_hi`.
    pub fn realize_marks(&self, k_lo: i64, k_hi: i64) {
        self.with_marks(k_lo.min(0), k_hi.max(0), |_| ());
    }

    /// Forces realization of every mark relevant to sites `[lo, hi]`.
    pub fn realize_sites(&self, lo: i64, hi: i64) {
        self.with_sites(lo, hi, |_| ());
    }

    pub fn mark(&self, k: i64) -> Mark {
        self.with_marks(k.min(0), k.max(0), |w| get_mark(w, k))
    }

    pub fn lambda(&self, k: i64) -> f64 {
        self.mark(k).lambda
    }

    pub fn xi(&self, k: i64) -> f64 {
        self.mark(k).xi()
    }

    pub fn gap(&self, k: i64) -> u64 {
        self.mark(k).gap
    }

    /// Site of mark `k`.
    pub fn position(&self, k: i64) -> i64 {
        self.mark(k).position
    }

    /// Index of the mark at site `n`, if any.
    pub fn marked_index_at(&self, n: i64) -> Option<i64> {
        self.with_sites(n, n, |w| find_at(w, n).map(|m| m.index))
    }

    /// Index of the last mark at or left of site `n`.
    pub fn mark_at_or_before(&self, n: i64) -> i64 {
        self.with_sites(n, n, |w| {
            if n >= w.pos[0].position {
                let i = w.pos.partition_point(|m| m.position <= n);
                w.pos[i - 1].index
            } else {
                let i = w.neg.partition_point(|m| m.position > n);
                w.neg[i].index
            }
        })
    }

    pub fn omega(&self, n: i64) -> f64 {
        self.with_sites(n, n, |w| find_at(w, n).map_or(0.5, |m| m.lambda))
    }

    pub fn rho(&self, n: i64) -> f64 {
        let o = self.omega(n);
        (1.0 - o) / o
    }

    /// `omega_n` for `n` in `[lo, hi]`.
    pub fn omega_table(&self, lo: i64, hi: i64) -> Vec<f64> {
        let mut out = vec![0.5; (hi - lo + 1).max(0) as usize];
        self.for_marks_in(lo, hi, |m| out[(m.position - lo) as usize] = m.lambda);
        out
    }

    /// Calls `f` on every mark whose site lies in `[lo, hi]`, left to right.
    pub fn for_marks_in(&self, lo: i64, hi: i64, mut f: impl FnMut(&Mark)) {
        if lo > hi {
            return;
        }
        self.with_sites(lo, hi, |w| {
            let neg_start = w.neg.partition_point(|m| m.position > hi);
            let neg_end = w.neg.partition_point(|m| m.position >= lo);
            for m in w.neg[neg_start..neg_end].iter().rev() {
                f(m);
            }
            let pos_start = w.pos.partition_point(|m| m.position < lo);
            let pos_end = w.pos.partition_point(|m| m.position <= hi);
            for m in &w.pos[pos_start..pos_end] {
                f(m);
            }
        })
    }

    pub fn marks_in(&self, lo: i64, hi: i64) -> Vec<Mark> {
        let mut out = Vec::new();
        self.for_marks_in(lo, hi, |m| out.push(*m));
        out
    }

    /// Number of marks in `sign(n) * [1, |n|]`.
    pub fn eta(&self, n: i64) -> u64 {
        let mut count = 0;
        match n.signum() {
            1 => self.for_marks_in(1, n, |_| count += 1),
            -1 => self.for_marks_in(n, -1, |_| count += 1),
            _ => {}
        }
        count
    }

    /// `R_n`: sum of `log rho` over sites `1..=n` (n > 0) or `-(sum over n+1..=0)` (n < 0).
    pub fn potential(&self, n: i64) -> f64 {
        let mut s = crate::numerics::CompensatedSum::default();
        match n.signum() {
            1 => self.for_marks_in(1, n, |m| s.add(m.xi().ln())),
            -1 => self.for_marks_in(n + 1, 0, |m| s.add(-m.xi().ln())),
            _ => {}
        }
        s.value()
    }

    /// Dump rows for marks `k_lo..=k_hi`, positions including the shift.
    pub fn rows(&self, k_lo: i64, k_hi: i64) -> Vec<EnvRow> {
        self.realize_marks(k_lo, k_hi);
        (k_lo..=k_hi)
            .map(|k| {
                let m = self.mark(k);
                EnvRow { k, a_k: m.position, lambda_k: m.lambda, d_k: m.gap }
            })
            .collect()
    }

    /// The gap law of the spec.
    pub fn gap_dist(&self) -> &Dist {
        &self.spec.gap_dist
    }
}

fn get_mark(w: &Window, k: i64) -> Mark {
    if k >= 0 {
        w.pos[k as usize]
    } else {
        w.neg[(-k - 1) as usize]
    }
}

fn find_at(w: &Window, n: i64) -> Option<&Mark> {
    if n >= w.pos[0].position {
        w.pos.binary_search_by_key(&n, |m| m.position).ok().map(|i| &w.pos[i])
    } else {
        w.neg.binary_search_by(|m| n.cmp(&m.position)).ok().map(|i| &w.neg[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(lambda: Dist, gap: Dist) -> EnvironmentSpec {
        EnvironmentSpec::new(lambda, gap).unwrap()
    }

    #[test]
    fn dense_marking_is_classical() {
        let env = sample_environment(&spec(Dist::constant(0.7), Dist::constant(1.0)), 3, 8).unwrap();
        for n in -50..50 {
            assert_eq!(env.omega(n), 0.7);
            assert_eq!(env.marked_index_at(n), Some(n));
            assert_eq!(env.eta(n), n.unsigned_abs());
        }
    }

    #[test]
    fn fair_biases_are_invisible() {
        let env = sample_environment(&spec(Dist::constant(0.5), Dist::uniform_on(&[1.0, 4.0, 9.0])), 1, 4).unwrap();
        for n in -100..100 {
            assert_eq!(env.omega(n), 0.5);
            assert_eq!(env.potential(n), 0.0);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let s = spec(Dist::constant(2.0 / 3.0), Dist::uniform_on(&[1.0, 3.0]));
        let a = sample_environment(&s, 42, 8).unwrap();
        let b = sample_environment(&s, 42, 8).unwrap();
        assert_eq!(a.rows(-8, 8), b.rows(-8, 8));
        // Lazily extending one copy leaves realized values unchanged.
        let before = a.rows(-8, 8);
        let _ = a.omega(10_000);
        let _ = a.omega(-10_000);
        assert_eq!(a.rows(-8, 8), before);
        assert_eq!(a.rows(-200, 200), b.rows(-200, 200));
        let c = sample_environment(&s, 43, 8).unwrap();
        assert_ne!(a.rows(-8, 8), c.rows(-8, 8));
    }

    #[test]
    fn potential_direct_summation() {
        let env = sample_environment(&spec(Dist::constant(2.0 / 3.0), Dist::constant(1.0)), 0, 2).unwrap();
        for n in -20i64..=20 {
            let mut oracle = 0.0;
            if n > 0 {
                for k in 1..=n {
                    oracle += env.rho(k).ln();
                }
            } else {
                for k in 0..n.unsigned_abs() as i64 {
                    oracle -= env.rho(-k).ln();
                }
            }
            assert!((env.potential(n) - oracle).abs() < 1e-12);
            assert!((env.potential(n) + n as f64 * 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn counting_and_lookup() {
        let env = sample_environment(&spec(Dist::constant(0.8), Dist::uniform_on(&[1.0, 2.0, 3.0])), 5, 3).unwrap();
        let a1 = env.position(1);
        let a2 = env.position(2);
        assert_eq!(env.omega(a1), 0.8);
        assert_eq!(env.eta(a1), 1);
        assert_eq!(env.eta(a2), 2);
        if a1 > 1 {
            assert_eq!(env.omega(a1 - 1), 0.5);
            assert_eq!(env.eta(a1 - 1), 0);
        }
        assert_eq!(env.mark_at_or_before(a2 - 1), 1);
        assert_eq!(env.position(-1), -(env.gap(0) as i64));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gaps_match_positions(seed in any::<u64>(), lo in -300i64..0, hi in 0i64..300) {
            let s = spec(Dist::two_point(0.3, 0.5, 0.8), Dist::uniform_on(&[1.0, 2.0, 5.0]));
            let env = sample_environment(&s, seed, 2).unwrap();
            env.realize_marks(lo, hi);
            for k in lo + 1..=hi {
                prop_assert_eq!(env.position(k) - env.position(k - 1), env.gap(k) as i64);
            }
            prop_assert_eq!(env.position(0), 0);
            for n in lo..hi {
                let w = env.omega(n);
                prop_assert_eq!(w.to_bits(), env.omega(n).to_bits());
                prop_assert_eq!(env.potential(n).to_bits(), env.potential(n).to_bits());
                prop_assert_eq!(w != 0.5, env.marked_index_at(n).is_some());
            }
            let table = env.omega_table(lo, hi);
            for (i, w) in table.iter().enumerate() {
                prop_assert_eq!(*w, env.omega(lo + i as i64));
            }
        }
    }
}
