//! Seeded, splittable random streams.
//!
//! Every stochastic routine takes an explicit `&mut impl Rng`. Experiments
//! derive one stream per (master seed, name, replica index) so replicas can run
//! in any order, on any number of workers, and still reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Concrete generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable 64-bit digest of a stream name (FNV-1a followed by a splitmix finalizer).
fn name_digest(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(h)
}

/// Independent stream keyed by `(master, name, index)`.
pub fn stream(master: u64, name: &str, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master ^ name_digest(name)));
    rng.set_stream(index);
    rng
}

/// Stream for a bare seed, used by examples and tests.
pub fn seeded(seed: u64) -> StreamRng {
    stream(seed, "", 0)
}
