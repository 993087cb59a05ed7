//! Deterministic, replicate-indexed random number streams.
//!
//! ChaCha is a counter-based stream cipher: a (key, stream) pair addresses
//! an independent 2^64-block keystream and the block counter is the draw
//! index. Keying the stream by the replicate index makes every replicate's
//! draw sequence a pure function of `(seed, replicate)`, independent of
//! thread scheduling, which is what makes parallel Monte Carlo runs
//! bitwise reproducible.

use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

/// The generator used throughout the crate.
pub type Stream = ChaCha12Rng;

/// An independent stream for the given replicate of the given experiment.
pub fn replicate_stream(seed: u64, replicate: u64) -> Stream {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}
