//! Deterministic random streams.
//!
//! A splitmix64 generator keeps sampling reproducible bit-for-bit across
//! platforms and thread counts, which the report determinism contract
//! depends on. Per-sample streams are derived as `seed ^ sample_index`.

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    /// Stream for one sample of one named check.
    pub fn for_sample(seed: u64, salt: u64, index: u64) -> Self {
        Rng::new(seed ^ salt ^ index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard complex Gaussian via Box-Muller (unit variance per axis).
    pub fn next_complex_gauss(&mut self) -> Complex64 {
        let u1 = (1.0 - self.next_f64()).max(f64::MIN_POSITIVE);
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(r * phi.cos(), r * phi.sin())
    }
}

/// FNV-1a hash of a check name, used to salt per-check streams.
pub fn salt(name: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in name.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
