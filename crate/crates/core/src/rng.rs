//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, purpose, replica, index)`. The ChaCha
//! key comes from the seed and purpose, the replica selects the stream and
//! the index selects a fixed-size block of the keystream, so draws never
//! depend on how many values were consumed elsewhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Keystream words reserved for each index.
const WORDS_PER_INDEX: u128 = 1 << 12;

/// Independent families of draws sharing one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    /// The atom `e_{n+1}` used at step `n`.
    Atom = 1,
    /// Fixed sample used to estimate `F` for parametric objectives.
    Evaluation = 2,
    /// Probe points and random states for property checks.
    Probe = 3,
    /// Fresh atoms for Monte Carlo conditional expectations.
    Conditional = 4,
}

pub fn stream(seed: u64, purpose: Purpose, replica: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&0x9e37_79b9_7f4a_7c15u64.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replica);
    rng.set_word_pos(index as u128 * WORDS_PER_INDEX);
    rng
}
