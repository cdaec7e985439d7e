//! Reproducible per-trajectory random streams.
//!
//! Every trajectory gets a 64-bit key derived from
//! `(master_seed, trajectory_index, realization_index)` by a SplitMix64-style
//! mixing chain; the key seeds a ChaCha8 generator. Keys are a pure function of
//! their inputs, so any trajectory can be replayed from its recorded key alone,
//! independent of how work was scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrajectoryRng = ChaCha8Rng;

/// Domain tag separating potential-realization streams from trajectory streams.
const REALIZATION_DOMAIN: u64 = 0x5245_414c_495a_4154;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key for trajectory `index` using potential realization `realization`.
pub fn trajectory_key(master_seed: u64, index: u64, realization: u64) -> u64 {
    let a = splitmix64(master_seed);
    let b = splitmix64(a ^ index);
    splitmix64(b ^ realization.rotate_left(32))
}

/// Key for drawing potential realization `realization` (θ or on-site energies).
pub fn realization_key(master_seed: u64, realization: u64) -> u64 {
    trajectory_key(master_seed, REALIZATION_DOMAIN, realization)
}

pub fn stream(key: u64) -> TrajectoryRng {
    ChaCha8Rng::seed_from_u64(key)
}
