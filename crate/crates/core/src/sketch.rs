//! One estimator copy: k complex accumulators Z_{e*}, one per oriented
//! pattern edge. An arriving size-l stream edge adds, to every accumulator
//! whose pattern edge has size l, the sum over all l! orientations of the
//! term M = prod_i X_{c_i}(u_i) * Q^(Y(u_i)/deg(c_i)); deletions subtract
//! the same sum. The query returns the real part of the scaled product of
//! the k accumulators.
//!
//! Every term is a root of unity of order D = tau * lcm(deg(c)), so its
//! exponent is accumulated in exact integer arithmetic modulo D and
//! converted to a complex number with a single exponential. Permutations
//! are enumerated in lexicographic order, making the per-edge delta a pure
//! function of (edge, basis): an insert followed by a delete of the same
//! edge adds and subtracts the identical floating-point value.
//!
//! Deltas are snapped to the 2^-36 binary grid before accumulation. On
//! that grid double addition is exact (no rounding) while components stay
//! below 2^17, so insert/delete cancellation restores accumulators
//! bitwise, pure-insert streams are order-invariant, and merged shard
//! sketches equal the single-stream sketch exactly. The snap costs at
//! most 2^-37 per component per update, far below every estimator
//! tolerance.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::hashing::{derive_basis, RandomBasis};
use crate::pattern::PatternProfile;
use crate::permute::next_permutation;

/// Accumulator components are kept on this grid; see the module docs.
const ACCUMULATOR_SCALE: f64 = (1u64 << 36) as f64;

#[inline]
fn snap_to_grid(x: f64) -> f64 {
    (x * ACCUMULATOR_SCALE).round() / ACCUMULATOR_SCALE
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SketchError {
    #[error("tuple length {got} does not match pattern edge size {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("edge of size {size} exceeds maximum {max}")]
    EdgeTooLarge { size: usize, max: usize },
    #[error("duplicate vertex {0} in edge")]
    DuplicateVertexInEdge(u64),
    #[error("edge has no vertices")]
    EmptyEdge,
    #[error("sketches have different seeds or profiles")]
    BasisMismatch,
    #[error("unsupported sketch format version {0}")]
    VersionMismatch(u16),
    #[error("sketch was built for a different pattern profile")]
    FingerprintMismatch,
    #[error("corrupt sketch payload: {0}")]
    CorruptPayload(String),
}

/// Turnstile update direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Insert,
    Delete,
}

impl Sign {
    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            Sign::Insert => 1.0,
            Sign::Delete => -1.0,
        }
    }

    #[inline]
    pub fn delta(self) -> i64 {
        match self {
            Sign::Insert => 1,
            Sign::Delete => -1,
        }
    }
}

/// A signed stream edge, canonicalized to ascending vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamEdge {
    sign: Sign,
    vertices: Vec<u64>,
}

impl StreamEdge {
    pub fn new(sign: Sign, mut vertices: Vec<u64>) -> Result<Self, SketchError> {
        if vertices.is_empty() {
            return Err(SketchError::EmptyEdge);
        }
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(SketchError::DuplicateVertexInEdge(w[0]));
        }
        Ok(StreamEdge { sign, vertices })
    }

    pub fn insert(vertices: Vec<u64>) -> Result<Self, SketchError> {
        StreamEdge::new(Sign::Insert, vertices)
    }

    pub fn delete(vertices: Vec<u64>) -> Result<Self, SketchError> {
        StreamEdge::new(Sign::Delete, vertices)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// The same edge with the opposite sign.
    pub fn inverted(&self) -> StreamEdge {
        StreamEdge {
            sign: match self.sign {
                Sign::Insert => Sign::Delete,
                Sign::Delete => Sign::Insert,
            },
            vertices: self.vertices.clone(),
        }
    }
}

/// Integer exponent E in {0, .., D-1} such that
/// M_{e*}(u_1, .., u_l) = exp(2*pi*i * E / D) for pattern edge `edge_index`
/// and the oriented stream tuple: E accumulates
/// x_exponent(c_i, u_i) * D/deg(c_i) + q_exponent * Y(u_i) * L/deg(c_i)
/// over the positions, all in exact integer arithmetic mod D.
pub fn term_exponent(
    profile: &PatternProfile,
    basis: &RandomBasis,
    edge_index: usize,
    tuple: &[u64],
) -> Result<u64, SketchError> {
    if basis.profile_fingerprint() != profile.fingerprint() {
        return Err(SketchError::BasisMismatch);
    }
    let pattern_edge = &profile.oriented_edge_indices()[edge_index];
    if tuple.len() != pattern_edge.len() {
        return Err(SketchError::SizeMismatch {
            expected: pattern_edge.len(),
            got: tuple.len(),
        });
    }
    let d = profile.exponent_modulus() as u128;
    let q = basis.q_exponent() as u128;
    let mut acc: u128 = 0;
    for (i, (&c, &u)) in pattern_edge.iter().zip(tuple).enumerate() {
        let x = basis.x_exponent_at(c, u) as u128;
        let y = basis.y_value(u) as u128;
        let term = (x * profile.x_stride(edge_index, i) as u128
            + q * y % d * profile.q_stride(edge_index, i) as u128)
            % d;
        acc = (acc + term) % d;
    }
    Ok(acc as u64)
}

/// One estimator copy over a fixed (pattern profile, seed).
#[derive(Debug, Clone)]
pub struct Sketch {
    profile: Arc<PatternProfile>,
    basis: RandomBasis,
    accumulators: Vec<Complex64>,
    edges_processed: i64,
}

impl Sketch {
    pub fn new(profile: Arc<PatternProfile>, seed: u64) -> Sketch {
        let basis = derive_basis(&profile, seed);
        let k = profile.k();
        Sketch {
            profile,
            basis,
            accumulators: vec![Complex64::new(0.0, 0.0); k],
            edges_processed: 0,
        }
    }

    pub fn profile(&self) -> &Arc<PatternProfile> {
        &self.profile
    }

    pub fn basis(&self) -> &RandomBasis {
        &self.basis
    }

    pub fn seed(&self) -> u64 {
        self.basis.seed()
    }

    pub fn accumulators(&self) -> &[Complex64] {
        &self.accumulators
    }

    /// Net update count: inserts minus deletes.
    pub fn edges_processed(&self) -> i64 {
        self.edges_processed
    }

    /// Applies one signed edge. Every pattern edge of matching size gains
    /// (or loses) the sum over all l! orientations; other accumulators are
    /// untouched. Returns the number of terms summed.
    pub fn update(&mut self, edge: &StreamEdge) -> Result<u64, SketchError> {
        let l = edge.size();
        let max = self.profile.limits().max_edge_size;
        if l > max {
            return Err(SketchError::EdgeTooLarge { size: l, max });
        }
        let d = self.profile.exponent_modulus();
        let d_wide = d as u128;
        let q = self.basis.q_exponent() as u128;
        let sign = edge.sign().factor();
        let vertices = edge.vertices();

        let ys: Vec<u128> = vertices
            .iter()
            .map(|&v| self.basis.y_value(v) as u128)
            .collect();

        let mut terms = 0u64;
        let mut contrib = vec![0u64; l * l];
        let mut perm: Vec<usize> = Vec::with_capacity(l);
        for (j, pattern_edge) in self.profile.oriented_edge_indices().iter().enumerate() {
            if pattern_edge.len() != l {
                continue;
            }
            // contrib[i][a]: exponent contribution of placing stream vertex
            // u_a at position i of the oriented pattern edge.
            for (i, &c) in pattern_edge.iter().enumerate() {
                let x_stride = self.profile.x_stride(j, i) as u128;
                let q_stride = self.profile.q_stride(j, i) as u128;
                for a in 0..l {
                    let x = self.basis.x_exponent_at(c, vertices[a]) as u128;
                    contrib[i * l + a] =
                        ((x * x_stride + q * ys[a] % d_wide * q_stride) % d_wide) as u64;
                }
            }

            perm.clear();
            perm.extend(0..l);
            let mut local = Complex64::new(0.0, 0.0);
            loop {
                let mut exponent = 0u64;
                for (i, &a) in perm.iter().enumerate() {
                    exponent += contrib[i * l + a];
                    if exponent >= d {
                        exponent -= d;
                    }
                }
                let theta = std::f64::consts::TAU * exponent as f64 / d as f64;
                local += Complex64::new(theta.cos(), theta.sin());
                terms += 1;
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            let local = Complex64::new(snap_to_grid(local.re), snap_to_grid(local.im));
            self.accumulators[j] += sign * local;
        }
        self.edges_processed += edge.sign().delta();
        Ok(terms)
    }

    /// Z_H(G): the product of the k accumulators.
    pub fn raw_product(&self) -> Complex64 {
        self.accumulators
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, z| acc * z)
    }

    /// One copy's estimate: scale * Re(Z_H(G)). Unbiased but high-variance.
    pub fn query(&self) -> f64 {
        self.profile.scale_f64() * self.raw_product().re
    }

    /// Componentwise sum of two sketches of the same (seed, profile):
    /// equals the sketch of the concatenated streams up to floating-point
    /// reassociation.
    pub fn merge(&self, other: &Sketch) -> Result<Sketch, SketchError> {
        if !self.basis.same_identity(&other.basis) {
            return Err(SketchError::BasisMismatch);
        }
        let accumulators = self
            .accumulators
            .iter()
            .zip(&other.accumulators)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Sketch {
            profile: Arc::clone(&self.profile),
            basis: self.basis.clone(),
            accumulators,
            edges_processed: self.edges_processed + other.edges_processed,
        })
    }
}

pub(crate) const SKETCH_MAGIC: &[u8; 4] = b"HCSK";
pub(crate) const SKETCH_FORMAT_VERSION: u16 = 1;

/// Serialized size in bytes of a sketch with `k` accumulators.
pub(crate) fn sketch_byte_len(k: usize) -> usize {
    4 + 2 + 32 + 8 + 8 + 4 + 16 * k
}

impl Sketch {
    /// Sketch file payload: magic "HCSK", format version, profile
    /// fingerprint, seed, net edge count, k, then k little-endian
    /// (re, im) double pairs. Hash coefficients are re-derived from the
    /// seed on load, never stored.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(sketch_byte_len(self.accumulators.len()));
        out.extend_from_slice(SKETCH_MAGIC);
        out.extend_from_slice(&SKETCH_FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(self.basis.profile_fingerprint());
        out.extend_from_slice(&self.basis.seed().to_le_bytes());
        out.extend_from_slice(&self.edges_processed.to_le_bytes());
        out.extend_from_slice(&(self.accumulators.len() as u32).to_le_bytes());
        for z in &self.accumulators {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], profile: Arc<PatternProfile>) -> Result<Sketch, SketchError> {
        let header_len = 4 + 2 + 32 + 8 + 8 + 4;
        if bytes.len() < header_len {
            return Err(SketchError::CorruptPayload("truncated header".into()));
        }
        if &bytes[0..4] != SKETCH_MAGIC {
            return Err(SketchError::CorruptPayload("bad magic".into()));
        }
        let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        if version != SKETCH_FORMAT_VERSION {
            return Err(SketchError::VersionMismatch(version));
        }
        if &bytes[6..38] != profile.fingerprint() {
            return Err(SketchError::FingerprintMismatch);
        }
        let seed = u64::from_le_bytes(bytes[38..46].try_into().unwrap());
        let edges_processed = i64::from_le_bytes(bytes[46..54].try_into().unwrap());
        let k = u32::from_le_bytes(bytes[54..58].try_into().unwrap()) as usize;
        if k != profile.k() {
            return Err(SketchError::CorruptPayload(format!(
                "accumulator count {} does not match pattern edge count {}",
                k,
                profile.k()
            )));
        }
        if bytes.len() != sketch_byte_len(k) {
            return Err(SketchError::CorruptPayload(format!(
                "expected {} bytes, got {}",
                sketch_byte_len(k),
                bytes.len()
            )));
        }
        let mut accumulators = Vec::with_capacity(k);
        let mut offset = header_len;
        for _ in 0..k {
            let re = f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[offset + 8..offset + 16].try_into().unwrap());
            accumulators.push(Complex64::new(re, im));
            offset += 16;
        }
        let basis = derive_basis(&profile, seed);
        Ok(Sketch {
            profile,
            basis,
            accumulators,
            edges_processed,
        })
    }
}
