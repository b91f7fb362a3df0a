//! Counter-based randomness.
//!
//! Every random draw in the crate is addressed by `(seed, purpose, indices)`.
//! A stream for one address never depends on how many draws were taken from
//! any other address, so adding a model or a marker variant leaves all
//! unrelated draws untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a of a string, used to turn identifiers into stream indices.
pub fn key_str(s: &str) -> u64 {
    s.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Mixes an address into a single 64-bit key.
pub fn derive_key(seed: u64, purpose: &str, indices: &[u64]) -> u64 {
    let mut h = splitmix64(seed ^ key_str(purpose));
    for &ix in indices {
        h = splitmix64(h ^ splitmix64(ix));
    }
    h
}

/// A ChaCha8 stream for the given address.
pub fn stream(seed: u64, purpose: &str, indices: &[u64]) -> ChaCha8Rng {
    let key = derive_key(seed, purpose, indices);
    let mut bytes = [0u8; 32];
    let mut h = key;
    for chunk in bytes.chunks_exact_mut(8) {
        h = splitmix64(h);
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

/// A single uniform draw in `[0, 1)` for the given address.
pub fn unit(seed: u64, purpose: &str, indices: &[u64]) -> f64 {
    let h = splitmix64(derive_key(seed, purpose, indices));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
