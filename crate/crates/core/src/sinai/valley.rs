use serde::{Deserialize, Serialize};

use super::potential::PotentialPath;

/// `W(bottom)` is the minimum over `[left, right]` and both walls rise at
/// least `depth` above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Valley {
    pub left: f64,
    pub bottom: f64,
    pub right: f64,
    pub depth: f64,
}

impl Valley {
    pub fn contains(&self, t: f64) -> bool {
        self.left <= t && t <= self.right
    }
}

/// Argmin of the path on `lo..=hi`, ties toward the smallest `|t|`, then left.
fn bottom_index(s: &[(f64, f64)], lo: usize, hi: usize) -> usize {
    let mut best = lo;
    for i in lo + 1..=hi {
        let (t, w) = s[i];
        let (bt, bw) = s[best];
        if w < bw || (w == bw && t.abs() < bt.abs()) {
            best = i;
        }
    }
    best
}

fn make(s: &[(f64, f64)], l: usize, r: usize) -> Valley {
    let m = bottom_index(s, l, r);
    Valley { left: s[l].0, bottom: s[m].0, right: s[r].0, depth: (s[l].1 - s[m].1).min(s[r].1 - s[m].1) }
}

/// All valleys of depth at least `min_depth` that contain no smaller one.
///
/// With `mu` the minimum on `[l, r]`, the interval is minimal exactly when
/// both ends reach `mu + min_depth` and every interior point stays below
/// it. The minimum only falls as `r` grows, so each left end needs one
/// forward scan that stops at the first point reaching the bar.
pub fn find_valleys(path: &PotentialPath, min_depth: f64) -> Vec<Valley> {
    assert!(min_depth > 0.0, "valley depth must be positive");
    let s = &path.samples;
    let mut out = Vec::new();
    for l in 0..s.len().saturating_sub(2) {
        let (mut mu, mut top) = (s[l + 1].1, s[l + 1].1);
        for r in l + 2..s.len() {
            if top >= mu + min_depth {
                break;
            }
            if s[r].1 >= mu + min_depth {
                if s[l].1 >= mu + min_depth {
                    out.push(make(s, l, r));
                }
                break;
            }
            mu = mu.min(s[r].1);
            top = top.max(s[r].1);
        }
    }
    out
}

/// Max-tree over a slice, answering "first index at or after `from` whose
/// value reaches `thr`" in logarithmic time.
struct MaxTree {
    size: usize,
    len: usize,
    node: Vec<f64>,
}

impl MaxTree {
    fn new(v: &[f64]) -> Self {
        let size = v.len().next_power_of_two().max(1);
        let mut node = vec![f64::NEG_INFINITY; 2 * size];
        node[size..size + v.len()].copy_from_slice(v);
        for i in (1..size).rev() {
            node[i] = node[2 * i].max(node[2 * i + 1]);
        }
        MaxTree { size, len: v.len(), node }
    }

    fn first_at_least(&self, from: usize, thr: f64) -> Option<usize> {
        self.descend(1, 0, self.size, from, thr).filter(|&i| i < self.len)
    }

    fn descend(&self, i: usize, lo: usize, hi: usize, from: usize, thr: f64) -> Option<usize> {
        if hi <= from || self.node[i] < thr {
            return None;
        }
        if hi - lo == 1 {
            return Some(lo);
        }
        let mid = (lo + hi) / 2;
        self.descend(2 * i, lo, mid, from, thr).or_else(|| self.descend(2 * i + 1, mid, hi, from, thr))
    }
}

/// Smallest valley of depth at least `min_depth` whose closed span holds
/// the origin sample. Among incomparable minimal spans the narrowest wins,
/// then the one with the bottom closest to the origin.
///
/// For a left end `l` the span `[l, r]` qualifies once the running minimum
/// sits `min_depth` below both ends. Writing `m_l` for the minimum on
/// `[l, o]` and `P(r)` for the prefix minimum on `[o, r]`, the first
/// qualifying `r` is found by binary search on `P` and a max-tree query,
/// without rescanning the right side for every `l`.
pub fn valley_containing_origin(path: &PotentialPath, min_depth: f64) -> Option<Valley> {
    assert!(min_depth > 0.0, "valley depth must be positive");
    let s = &path.samples;
    let o = path.origin_index();
    let right: Vec<f64> = s[o..].iter().map(|x| x.1).collect();
    let mut prefix = right.clone();
    for i in 1..prefix.len() {
        prefix[i] = prefix[i].min(prefix[i - 1]);
    }
    let values = MaxTree::new(&right);
    // next_rise[j]: first j' >= j with W - P >= min_depth.
    let mut next_rise = vec![usize::MAX; right.len() + 1];
    for j in (0..right.len()).rev() {
        next_rise[j] = if right[j] - prefix[j] >= min_depth { j } else { next_rise[j + 1] };
    }
    // First j >= from with P(j) <= level; P is nonincreasing.
    let drop_to = |from: usize, level: f64| {
        let j = from + prefix[from..].partition_point(|&p| p > level);
        (j < prefix.len()).then_some(j)
    };

    let first_r = |l: usize, m_l: f64| -> Option<usize> {
        let wl = s[l].1;
        let start = if l == o { 1 } else { 0 };
        if start >= right.len() {
            return None;
        }
        let from = if m_l <= wl - min_depth { start } else { drop_to(start, wl - min_depth)? };
        // While P(j) >= m_l the running minimum is m_l.
        let split = prefix.partition_point(|&p| p >= m_l);
        if let Some(j) = values.first_at_least(from, m_l + min_depth) {
            if j < split {
                return Some(o + j);
            }
        }
        let j = next_rise[split.max(from)];
        (j != usize::MAX).then(|| o + j)
    };

    let mut best: Option<(usize, usize)> = None;
    let mut min_r = usize::MAX;
    let mut m_l = f64::INFINITY;
    for l in (0..=o).rev() {
        m_l = m_l.min(s[l].1);
        let Some(r) = first_r(l, m_l) else { continue };
        if r >= min_r {
            continue;
        }
        // Minimal: no span with a larger left end (already scanned) fits inside.
        min_r = r;
        let better = match best {
            None => true,
            Some((bl, br)) => {
                let (w, bw) = (s[r].0 - s[l].0, s[br].0 - s[bl].0);
                w < bw || (w == bw && make(s, l, r).bottom.abs() < make(s, bl, br).bottom.abs())
            }
        };
        if better {
            best = Some((l, r));
        }
    }
    best.map(|(l, r)| make(s, l, r))
}
