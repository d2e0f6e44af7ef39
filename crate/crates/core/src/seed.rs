//! Deterministic seed derivation.
//!
//! Every random quantity in the crate is drawn from a generator whose seed is
//! a pure function of `(master, stream, index)`. The split is the SplitMix64
//! finalizer applied twice, so nearby indices give unrelated seeds and no
//! generator state is ever shared between replicas or environment sites.

use rand::rngs::SmallRng;
use rand::SeedableRng;

/// Generator used for all simulation work.
pub type SimRng = SmallRng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Independent purposes a seed can be split for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Pair `(lambda_k, d_k)` at marked index `k`.
    EnvPair,
    /// Uniform variable of the dual shift.
    DualShift,
    /// Environment seed of replica `i`.
    ReplicaEnv,
    /// Walk seed of replica `i`.
    ReplicaWalk,
    /// Bootstrap resampling.
    Bootstrap,
    /// Free-form sub-experiment streams.
    Aux(u32),
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::EnvPair => 0x656e_7670,
            Stream::DualShift => 0x6475_616c,
            Stream::ReplicaEnv => 0x7265_7065,
            Stream::ReplicaWalk => 0x7265_7077,
            Stream::Bootstrap => 0x626f_6f74,
            Stream::Aux(k) => 0x6175_7800_0000_0000 | k as u64,
        }
    }
}

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for `index` within `stream` under `master`.
#[inline]
pub fn derive(master: u64, stream: Stream, index: u64) -> u64 {
    let keyed = mix64(master.wrapping_add(GOLDEN) ^ mix64(stream.tag()));
    mix64(keyed.wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// Bijection `i64 -> u64` so negative site indices get their own streams.
#[inline]
pub fn zigzag(k: i64) -> u64 {
    ((k << 1) ^ (k >> 63)) as u64
}

#[inline]
pub fn rng(master: u64, stream: Stream, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive(master, stream, index))
}

/// Environment and walk seeds of replica `i`.
pub fn replica_seeds(master: u64, i: u64) -> (u64, u64) {
    (
        derive(master, Stream::ReplicaEnv, i),
        derive(master, Stream::ReplicaWalk, i),
    )
}
