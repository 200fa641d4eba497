//! Counter-keyed random draws: every sample is a pure function of
//! (seed, index), so results do not depend on evaluation order or on how
//! work is split across threads.

use std::f64::consts::TAU;

/// SplitMix64 output for position `index` of the stream named by `seed`.
#[inline]
fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw in the open interval (0, 1): 53 random bits offset by half
/// an ulp so neither endpoint can occur.
#[inline]
pub fn uniform_at(seed: u64, index: u64) -> f64 {
    ((splitmix64(seed, index) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Standard normal draw. Consumes uniform indices 2·index and 2·index + 1,
/// so normal and uniform draws on the same seed must not share that range.
#[inline]
pub fn normal_at(seed: u64, index: u64) -> f64 {
    let u1 = uniform_at(seed, 2 * index);
    let u2 = uniform_at(seed, 2 * index + 1);
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}
