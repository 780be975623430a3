//! Splittable seeding.
//!
//! Every random quantity is drawn from its own ChaCha8 stream whose seed is a
//! SplitMix64 hash of a master seed and a path of integer labels. Streams are
//! therefore addressed, not consumed in sequence, and results do not depend on
//! evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Path label for simulated data.
pub const DATA: u64 = 0x6461_7461;
/// Path label for permutation draws inside a replication.
pub const PERM: u64 = 0x7065_726d;
/// Path label for a single permutation within a plan.
pub const PERM_INDEX: u64 = 0x7069_6478;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed of `master` at `path`.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &label| splitmix64(acc ^ splitmix64(label)))
}

/// Random stream for a derived seed.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable 64-bit label for a string identifier.
pub fn label(id: &str) -> u64 {
    let digest = Sha256::digest(id.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_path_sensitive() {
        let a = derive(1, &[2, 3]);
        assert_eq!(a, derive(1, &[2, 3]));
        assert_ne!(a, derive(1, &[3, 2]));
        assert_ne!(a, derive(2, &[2, 3]));
        assert_ne!(derive(1, &[]), derive(1, &[0]));
    }

    #[test]
    fn streams_reproduce() {
        let x: Vec<u64> = (0..4).map(|_| stream(9).random()).collect();
        let mut r = stream(9);
        let y: Vec<u64> = (0..4).map(|_| r.random()).collect();
        assert_ne!(x, y);
        let mut r2 = stream(9);
        assert_eq!(y, (0..4).map(|_| r2.random()).collect::<Vec<u64>>());
    }
}
