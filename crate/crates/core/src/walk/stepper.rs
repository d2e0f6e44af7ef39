use rand::{Rng, RngCore};
use serde::Serialize;

use crate::env::SparseEnvironment;

/// Position and elapsed time of a nearest-neighbor walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WalkState {
    pub position: i64,
    pub time: u64,
}

impl WalkState {
    pub fn origin() -> Self {
        WalkState { position: 0, time: 0 }
    }
}

/// One quenched step: right with probability `omega(position)`.
pub fn step<R: Rng + ?Sized>(env: &SparseEnvironment, state: WalkState, rng: &mut R) -> WalkState {
    let up = rng.random::<f64>() < env.omega(state.position);
    WalkState { position: state.position + if up { 1 } else { -1 }, time: state.time + 1 }
}

/// `floor(omega * 2^64)`, so that `next_u64() < t` has probability `omega`
/// up to 2^-64. Fair sites map to exactly 2^63.
fn threshold(omega: f64) -> u64 {
    if omega >= 1.0 {
        u64::MAX
    } else {
        (omega * 18_446_744_073_709_551_616.0) as u64
    }
}

/// Fast stepper over a dense threshold table of the environment.
///
/// The table covers `[lo, lo + len)` and doubles whenever the walk reaches
/// an edge. Draws exactly one `u64` per step, so it is bit-compatible with
/// itself across table growth.
pub struct Stepper<'e> {
    env: &'e SparseEnvironment,
    lo: i64,
    table: Vec<u64>,
}

impl<'e> Stepper<'e> {
    pub fn new(env: &'e SparseEnvironment, center: i64, half_width: i64) -> Self {
        let half_width = half_width.max(16);
        let mut s = Stepper { env, lo: center - half_width, table: Vec::new() };
        s.fill(center - half_width, center + half_width);
        s
    }

    fn fill(&mut self, lo: i64, hi: i64) {
        self.lo = lo;
        self.table = self.env.omega_table(lo, hi).into_iter().map(threshold).collect();
    }

    fn grow(&mut self, x: i64) {
        let len = self.table.len() as i64;
        let hi = self.lo + len - 1;
        let (lo, hi) = if x <= self.lo { (self.lo - len, hi) } else { (self.lo, hi + len) };
        self.fill(lo, hi);
    }

    pub fn env(&self) -> &'e SparseEnvironment {
        self.env
    }

    /// Table extent `[lo, hi]`.
    pub fn extent(&self) -> (i64, i64) {
        (self.lo, self.lo + self.table.len() as i64 - 1)
    }

    #[inline]
    fn ensure(&mut self, x: i64) -> usize {
        let idx = x - self.lo;
        // The walk must stay strictly inside so that the next site is also covered.
        if idx <= 0 || idx >= self.table.len() as i64 - 1 {
            self.grow(x);
            return (x - self.lo) as usize;
        }
        idx as usize
    }

    #[inline]
    pub fn step<R: RngCore + ?Sized>(&mut self, x: i64, rng: &mut R) -> i64 {
        let idx = self.ensure(x);
        x + ((rng.next_u64() < self.table[idx]) as i64) * 2 - 1
    }

    /// Advances `steps` steps from `x`.
    pub fn run<R: RngCore + ?Sized>(&mut self, mut x: i64, steps: u64, rng: &mut R) -> i64 {
        let mut left = steps;
        while left > 0 {
            let idx = self.ensure(x);
            // Steps that provably stay inside the table need no bounds checks.
            let room = (idx as u64).min(self.table.len() as u64 - 1 - idx as u64) - 1;
            let burst = left.min(room.max(1));
            for _ in 0..burst {
                let i = (x - self.lo) as usize;
                x += ((rng.next_u64() < self.table[i]) as i64) * 2 - 1;
            }
            left -= burst;
        }
        x
    }

    /// Position at each time in `checkpoints` (nondecreasing).
    pub fn run_with_checkpoints<R: RngCore + ?Sized>(&mut self, mut x: i64, checkpoints: &[u64], rng: &mut R) -> Vec<i64> {
        let mut t = 0;
        let mut out = Vec::with_capacity(checkpoints.len());
        for &c in checkpoints {
            assert!(c >= t, "checkpoints must be nondecreasing");
            x = self.run(x, c - t, rng);
            t = c;
            out.push(x);
        }
        out
    }

    /// Steps until `target` is reached or `budget` steps elapse; returns
    /// `(position, steps taken, hit)`.
    pub fn run_until<R: RngCore + ?Sized>(&mut self, mut x: i64, target: i64, budget: u64, rng: &mut R) -> (i64, u64, bool) {
        let mut t = 0;
        while t < budget {
            if x == target {
                return (x, t, true);
            }
            x = self.step(x, rng);
            t += 1;
        }
        (x, t, x == target)
    }

    /// Steps from `x` until the walk sits on one of `a` or `b` (`a < x < b`
    /// is not required); returns the site reached and the step count.
    pub fn run_until_either<R: RngCore + ?Sized>(&mut self, mut x: i64, a: i64, b: i64, rng: &mut R) -> (i64, u64) {
        let mut t = 0;
        loop {
            x = self.step(x, rng);
            t += 1;
            if x == a || x == b {
                return (x, t);
            }
        }
    }
}

/// `(time, position)` pairs every `stride` steps, including time 0.
pub fn trajectory<R: RngCore + ?Sized>(env: &SparseEnvironment, steps: u64, stride: u64, rng: &mut R) -> Vec<(u64, i64)> {
    let stride = stride.max(1);
    let mut s = Stepper::new(env, 0, 1024);
    let mut out = vec![(0, 0)];
    let mut x = 0;
    let mut t = 0;
    while t < steps {
        let k = stride.min(steps - t);
        x = s.run(x, k, rng);
        t += k;
        out.push((t, x));
    }
    out
}
