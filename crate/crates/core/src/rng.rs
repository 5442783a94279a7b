//! Reproducible random streams.
//!
//! Every stochastic routine takes a 64-bit seed. Sub-streams (grid cells,
//! bootstrap replicates) get their own seed `derive_seed(master, index)`, so
//! results never depend on how work is scheduled across threads.
//!
//! A stream is ChaCha8 keyed with the seed's little-endian bytes in the first
//! 8 key bytes (the remaining 24 are zero), starting at block counter 0.
//! Uniforms take the top 53 bits of each 64-bit output, `u = (x >> 11 + ½)·2⁻⁵³`,
//! which never hits 0 or 1. Normals are `Φ⁻¹(u)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::normal::inv_cdf;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix64(master ^ splitmix64(index))`
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    pub fn standard_normal(&mut self) -> f64 {
        inv_cdf(self.uniform())
    }

    /// Uniform index in `0..n` (Lemire's multiply-shift with rejection).
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }
}
