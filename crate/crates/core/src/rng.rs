//! Counter-based random substreams.
//!
//! Every random quantity in the simulator is drawn from a ChaCha stream
//! addressed by (master seed, domain, index). The domain separates purposes
//! (channel entries, noise, payload bits), the index is a trial counter.
//! Streams for different addresses are independent, and a given address
//! always yields the same sequence, so results do not depend on scheduling
//! or worker count, and channel draws are shared across schemes and SNR
//! points by construction (common random numbers).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Channel matrix entries, addressed per trial.
pub const DOMAIN_CHANNEL: u64 = 0x6368616e;
/// Receiver noise, addressed per (SNR point, trial).
pub const DOMAIN_NOISE: u64 = 0x6e6f6973;
/// Payload bits, addressed per (SNR point, trial).
pub const DOMAIN_BITS: u64 = 0x62697473;

/// splitmix64 finalizer; decorrelates adjacent seeds and domains.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// RNG for the given (master, domain, index) address.
pub fn substream(master_seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let key = mix(master_seed ^ mix(domain));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Domain qualified by an SNR grid position, for per-point noise/bit streams.
pub fn point_domain(base: u64, point_index: usize) -> u64 {
    mix(base.wrapping_add(0x100000001).wrapping_mul(point_index as u64 + 1)) ^ base
}
