//! Reproducible, splittable random streams.
//!
//! Every replication draws from its own ChaCha8 stream addressed by
//! `(seed, domain, index)`, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Named sub-streams so that independent purposes never share randomness.
pub mod domain {
    pub const REPLICATION: u64 = 1;
    pub const ENDPOINT_CDF: u64 = 2;
    pub const INCREMENT_CDF: u64 = 3;
    pub const MLMC_LEVEL: u64 = 4;
    pub const MLMC_CACHE: u64 = 5;
    pub const AUXILIARY: u64 = 6;
}

/// Stream `index` of the key derived from `(seed, domain)`.
pub fn stream(seed: u64, domain: u64, index: u64) -> SimRng {
    let mut key = [0u8; 32];
    let mut z = seed ^ splitmix64(domain);
    for chunk in key.chunks_exact_mut(8) {
        z = splitmix64(z);
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
