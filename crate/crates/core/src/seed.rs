//! Stable seed derivation. Seeds are SHA-256 digests of tagged parts so
//! they do not depend on platform, hasher state or iteration order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

/// Hashes an arbitrary list of parts into a 64-bit seed.
pub fn derive_seed(parts: &[&dyn SeedPart]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        p.feed(&mut h);
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// `derive_seed(&[&seed, &tag])`.
pub fn sub_seed(seed: u64, tag: &str) -> u64 {
    derive_seed(&[&seed, &tag])
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub trait SeedPart {
    fn feed(&self, h: &mut Sha256);
}

impl SeedPart for u64 {
    fn feed(&self, h: &mut Sha256) {
        h.update([0u8]);
        h.update(self.to_le_bytes());
    }
}

impl SeedPart for usize {
    fn feed(&self, h: &mut Sha256) {
        (*self as u64).feed(h)
    }
}

impl SeedPart for &str {
    fn feed(&self, h: &mut Sha256) {
        h.update([1u8]);
        h.update((self.len() as u64).to_le_bytes());
        h.update(self.as_bytes());
    }
}

impl SeedPart for String {
    fn feed(&self, h: &mut Sha256) {
        self.as_str().feed(h)
    }
}
