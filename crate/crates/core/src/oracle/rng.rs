//! Keyed, stream-split ChaCha20 generators.
//!
//! The key is built from the user seed and a purpose tag; the ChaCha stream
//! number is the work-item index (codeword, Monte Carlo trial). Any item can
//! therefore be regenerated on its own, in any order or thread, with the same
//! bits on every platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Purpose tags separating the key spaces of independent draws.
pub(crate) const TAG_CODEBOOK: u64 = 0x636f_6465_626f_6f6b;
pub(crate) const TAG_CODEBOOK_T: u64 = 0x636f_6465_626f_6f74;
pub(crate) const TAG_MONTE_CARLO: u64 = 0x6d6f_6e74_6563_6172;
pub(crate) const TAG_SIMPLEX: u64 = 0x7369_6d70_6c65_7820;

pub(crate) fn stream(seed: u64, tag: u64, index: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Uniform on `[0, 1)` with 53 random bits.
pub(crate) fn unit(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF draw from `p`; zero-probability letters are never returned.
pub(crate) fn categorical(rng: &mut ChaCha20Rng, p: &[f64]) -> usize {
    let u = unit(rng);
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        acc += pi;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}
