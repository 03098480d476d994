//! Deterministic random streams for Monte Carlo trials.
//!
//! A sweep expands one master seed into independent streams keyed by the
//! trial coordinates, so trials can run on any number of workers in any
//! order and still reproduce bit-identically. The generator is
//! xoshiro256++ seeded through a splitmix64 chain; output is stable across
//! platforms and not suitable for anything cryptographic.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// What a derived stream is consumed for inside one trial.
///
/// Streams for different roles are independent even when the remaining key
/// words coincide. `Channel` streams are derived without the bundle size so
/// that all bundle sizes of a comparison see the same channel draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    Channel = 1,
    Precoder = 2,
    Pilot = 3,
    Noise = 4,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn splitmix_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    mix64(*state)
}

/// Deterministic xoshiro256++ stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    s: [u64; 4],
}

impl RngStream {
    /// Stream seeded directly from one 64-bit value.
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for word in &mut s {
            *word = splitmix_next(&mut sm);
        }
        // xoshiro must not start from the all-zero state
        if s == [0, 0, 0, 0] {
            s[0] = GOLDEN;
        }
        RngStream { s }
    }

    /// Derive an independent stream from a master seed and a key.
    ///
    /// Every distinct `(master_seed, words)` pair yields a stream that is
    /// statistically independent of all others; identical inputs yield
    /// identical streams.
    pub fn derive(master_seed: u64, words: &[u64]) -> Self {
        let mut h = mix64(master_seed ^ 0x243F_6A88_85A3_08D3);
        for &w in words {
            h = mix64(h.wrapping_add(GOLDEN) ^ mix64(w));
        }
        Self::from_seed(h)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform value in (0, 1].
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Two independent standard normal values (Box-Muller).
    #[inline]
    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let (sin, cos) = (TAU * self.uniform()).sin_cos();
        (r * cos, r * sin)
    }

    /// Circular complex Gaussian CN(0, 1): unit expected power overall,
    /// variance 1/2 per real component.
    #[inline]
    pub fn complex_normal(&mut self) -> Complex64 {
        let (re, im) = self.standard_normal_pair();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}
