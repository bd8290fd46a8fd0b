//! Counter-based seed derivation.
//!
//! Every random stream in an experiment is a ChaCha8 generator keyed by the
//! master seed and a [`Purpose`], with the trial index selecting the ChaCha
//! stream. Trial `t` therefore reproduces in isolation and the result of a
//! run does not depend on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for. Distinct purposes never share a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Drop = 1,
    Channel = 2,
    Reconstruction = 3,
    Silent = 4,
    Validation = 5,
    Synthetic = 6,
}

/// Generator for `(master, purpose, index)`.
pub fn stream(master: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(b"uplinkad");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// A 64-bit child seed for `(master, purpose, index)`, for APIs taking `u64` seeds.
pub fn child_seed(master: u64, purpose: Purpose, index: u64) -> u64 {
    use rand::RngCore;
    stream(master, purpose, index).next_u64()
}
