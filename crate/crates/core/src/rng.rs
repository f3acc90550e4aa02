//! Counter-derived random streams.
//!
//! Every consumer of randomness gets its own generator keyed by a path of
//! integers (master seed, purpose tag, graph index, iteration, ant index, ...).
//! Keys are hashed with SplitMix64 finalizers, never drawn sequentially from a
//! parent generator, so the stream a computation sees does not depend on how
//! many other streams were created before it or on which thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags mixed into derived seeds.
pub mod tag {
    pub const INSTANCE: u64 = 0x1157_A9CE;
    pub const COLONY: u64 = 0xC010_4E11;
    pub const REFERENCE: u64 = 0x4EFE_4E9C;
    pub const TRAIN: u64 = 0x7A41_9000;
    pub const EVAL: u64 = 0xE7A1_0000;
    pub const PARAMS: u64 = 0x9A4A_3500;
    pub const ANT: u64 = 0xA171_0000;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a key path.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(parent), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

/// A generator for the stream identified by `(parent, path)`.
pub fn stream(parent: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(parent, path))
}
