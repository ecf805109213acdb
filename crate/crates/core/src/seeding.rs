//! Splittable seeding: every random stream is ChaCha8 keyed by the master
//! seed, with the 64-bit ChaCha stream id selecting the sub-stream.
//!
//! Stream ids are `(purpose << 48) | index`, so a trial's randomness depends
//! only on `(seed, purpose, index)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const WALK: u64 = 0;
pub const MONTE_CARLO: u64 = 1;
pub const STATIONARY: u64 = 2;
pub const TEST_FUNCTIONS: u64 = 3;
pub const OPTIMIZER: u64 = 4;
pub const CHALLENGES: u64 = 5;

const INDEX_BITS: u32 = 48;

pub fn stream_id(purpose: u64, index: u64) -> u64 {
    debug_assert!(index < 1 << INDEX_BITS);
    (purpose << INDEX_BITS) | index
}

pub fn stream_rng(seed: u64, purpose: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(purpose, index));
    rng
}
