//! Randomness sources for the estimator: w-wise independent polynomial
//! hashes over the prime field F_p with p = 2^61 - 1, and the per-copy
//! [`RandomBasis`] bundling the exponent of the tau-th root of unity Q,
//! one deg(c)-th-root hash X_c per pattern vertex and the S-valued map Y.
//!
//! All coefficients are derived deterministically from a 64-bit seed and
//! the pattern fingerprint via a counter-mode splitmix-style PRF, so a
//! basis is never stored beyond (seed, fingerprint). Q, the X_c family and
//! Y draw from disjoint PRF domains.

use thiserror::Error;

use crate::pattern::PatternProfile;

/// The Mersenne prime 2^61 - 1. Vertex ids are hashed directly as field
/// elements; range reduction by `mod r` carries bias below 2^-50, accepted.
pub const FIELD_PRIME: u64 = (1 << 61) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HashError {
    #[error("vertex {0} is not a pattern vertex")]
    UnknownPatternVertex(u64),
}

#[inline]
fn mod_p(x: u128) -> u64 {
    const P: u128 = FIELD_PRIME as u128;
    let folded = (x & P) + (x >> 61);
    let folded = (folded & P) + (folded >> 61);
    let r = folded as u64;
    if r >= FIELD_PRIME {
        r - FIELD_PRIME
    } else {
        r
    }
}

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    mod_p(a as u128 * b as u128)
}

#[inline]
fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b; // both < 2^61, no overflow
    if s >= FIELD_PRIME {
        s - FIELD_PRIME
    } else {
        s
    }
}

/// splitmix64 finalizer; the workhorse behind seed expansion and the
/// deterministic stream generators used by the CLI benchmark.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

#[inline]
fn prf(key: u64, domain: u64, counter: u64) -> u64 {
    let mut h = key;
    h = mix64(h ^ domain.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x6a09e667f3bcc909));
    h = mix64(h ^ counter.wrapping_mul(0xbf58476d1ce4e5b9).wrapping_add(0xbb67ae8584caa73b));
    h
}

const DOMAIN_Q: u64 = 1;
const DOMAIN_Y: u64 = 2;
const DOMAIN_X_BASE: u64 = 16;

/// A w-wise independent hash: a uniformly random polynomial of degree
/// < w over F_p, evaluated by Horner and reduced into {0, .., range-1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KWiseHash {
    coefficients: Vec<u64>,
    range: u64,
}

impl KWiseHash {
    fn derive(key: u64, domain: u64, independence: usize, range: u64) -> Self {
        debug_assert!(independence >= 1 && range >= 1);
        let coefficients = (0..independence as u64)
            .map(|j| prf(key, domain, j) % FIELD_PRIME)
            .collect();
        KWiseHash {
            coefficients,
            range,
        }
    }

    pub fn independence(&self) -> usize {
        self.coefficients.len()
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// Horner evaluation at `key` over F_p, then `mod range`.
    pub fn eval(&self, key: u64) -> u64 {
        let x = key % FIELD_PRIME;
        let mut acc = 0u64;
        for &c in self.coefficients.iter().rev() {
            acc = add_mod(mul_mod(acc, x), c);
        }
        acc % self.range
    }
}

/// One estimator copy's randomness, fully determined by
/// (seed, profile fingerprint).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomBasis {
    seed: u64,
    q_exponent: u64,
    pattern_vertices: Vec<u64>,
    x_hashes: Vec<KWiseHash>,
    y_hash: KWiseHash,
    profile_fingerprint: [u8; 32],
}

/// Derives the complete randomness of one estimator copy from the pattern
/// profile and a 64-bit seed. X_c hashes are (2tk)-wise independent with
/// range deg(c); Y is 4k-wise independent with range t (the output index i
/// encodes Y = 2^i); Q's exponent is uniform in {0, .., tau-1}.
pub fn derive_basis(profile: &PatternProfile, seed: u64) -> RandomBasis {
    let fingerprint = *profile.fingerprint();
    let mut key = seed ^ 0x243f6a8885a308d3;
    for word in fingerprint.chunks_exact(8) {
        key = mix64(key ^ u64::from_le_bytes(word.try_into().expect("8-byte chunk")));
    }

    let t = profile.t();
    let k = profile.k();
    let x_independence = 2 * t * k;
    let y_independence = 4 * k;

    let q_exponent = prf(key, DOMAIN_Q, 0) % profile.tau();
    let x_hashes = profile
        .degrees()
        .iter()
        .enumerate()
        .map(|(i, &deg)| {
            KWiseHash::derive(key, DOMAIN_X_BASE + i as u64, x_independence, deg as u64)
        })
        .collect();
    let y_hash = KWiseHash::derive(key, DOMAIN_Y, y_independence, t as u64);

    RandomBasis {
        seed,
        q_exponent,
        pattern_vertices: profile.vertices().to_vec(),
        x_hashes,
        y_hash,
        profile_fingerprint: fingerprint,
    }
}

impl RandomBasis {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// j with Q = exp(2*pi*i * j / tau).
    pub fn q_exponent(&self) -> u64 {
        self.q_exponent
    }

    pub fn profile_fingerprint(&self) -> &[u8; 32] {
        &self.profile_fingerprint
    }

    pub fn x_hashes(&self) -> &[KWiseHash] {
        &self.x_hashes
    }

    pub fn y_hash(&self) -> &KWiseHash {
        &self.y_hash
    }

    /// Exponent x with X_c(v) = exp(2*pi*i * x / deg(c)), looked up by
    /// pattern vertex id.
    pub fn x_exponent(&self, c: u64, v: u64) -> Result<u64, HashError> {
        let idx = self
            .pattern_vertices
            .binary_search(&c)
            .map_err(|_| HashError::UnknownPatternVertex(c))?;
        Ok(self.x_hashes[idx].eval(v))
    }

    /// Same as [`RandomBasis::x_exponent`] but addressed by vertex index in
    /// the profile's sorted vertex order.
    #[inline]
    pub fn x_exponent_at(&self, c_index: usize, v: u64) -> u64 {
        self.x_hashes[c_index].eval(v)
    }

    /// Y(v) as an element of S = {1, 2, 4, .., 2^(t-1)}.
    #[inline]
    pub fn y_value(&self, v: u64) -> u64 {
        1u64 << self.y_hash.eval(v)
    }

    pub(crate) fn same_identity(&self, other: &RandomBasis) -> bool {
        self.seed == other.seed && self.profile_fingerprint == other.profile_fingerprint
    }
}
