//! Stable child-seed derivation.
//!
//! A child seed is the first eight bytes (little endian) of
//! `SHA-256(master_seed_le ‖ index_le ‖ stage_name_utf8)`. The scheme is fixed
//! so that reports stay reproducible across releases and platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive an independent seed for `(master, index, stage)`.
pub fn derive_seed(master: u64, index: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    h.update(stage.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// The generator used for every random stream in the crate.
pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
