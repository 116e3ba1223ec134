//! Named, independently seeded random streams.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::SimError;

/// A ChaCha8 stream keyed by `(global seed, node id, label)`.
///
/// The per-stream key is the SHA-256 of those three values, so adding a
/// node or a stream never shifts the draws of any other stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    node: u32,
    label: String,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(global_seed: u64, node: u32, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"abrsim.stream.v1");
        h.update(global_seed.to_le_bytes());
        h.update(node.to_le_bytes());
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        let key: [u8; 32] = h.finalize().into();
        Self { node, label: label.to_owned(), rng: ChaCha8Rng::from_seed(key) }
    }

    pub fn node(&self) -> u32 {
        self.node
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// One draw in `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One draw in `[lo, hi)`.
    pub fn next_uniform(&mut self, lo: f64, hi: f64) -> Result<f64, SimError> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(SimError::InvalidRange { lo, hi });
        }
        let v = lo + (hi - lo) * self.next_unit();
        // Rounding can land exactly on `hi` for very narrow ranges.
        Ok(if v >= hi { lo.max(hi.next_down()) } else { v })
    }
}
