//! A bank of s independently seeded estimator copies. Averaging the copies'
//! queries is the variance-reduction step that turns the raw estimator into
//! a (1 +- eps)-approximation; banks with identical configuration merge
//! copy-wise, so shards of a distributed stream can be combined.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::pattern::PatternProfile;
use crate::sketch::{Sketch, SketchError, StreamEdge};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BankError {
    #[error("banks have different configuration: {0}")]
    ConfigMismatch(String),
    #[error("at least two copies are required")]
    TooFewCopies,
    #[error("epsilon {0} is not in (0, 1)")]
    InvalidEpsilon(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Sketch(#[from] SketchError),
}

/// Copy counts above this are clamped by [`recommend_copies`].
pub const MAX_RECOMMENDED_COPIES: u64 = 1 << 20;

/// Fan out updates in parallel once a bank has this many copies.
const PARALLEL_THRESHOLD: usize = 64;

/// s seed-independent estimator copies with seeds seed_base + index.
#[derive(Debug, Clone)]
pub struct EstimatorBank {
    profile: Arc<PatternProfile>,
    copies: Vec<Sketch>,
    seed_base: u64,
}

impl EstimatorBank {
    pub fn new(
        profile: Arc<PatternProfile>,
        copies: usize,
        seed_base: u64,
    ) -> Result<EstimatorBank, BankError> {
        if copies == 0 {
            return Err(BankError::InvalidParameter(
                "copy count must be at least 1".into(),
            ));
        }
        let copies = (0..copies as u64)
            .map(|i| Sketch::new(Arc::clone(&profile), seed_base.wrapping_add(i)))
            .collect();
        Ok(EstimatorBank {
            profile,
            copies,
            seed_base,
        })
    }

    pub fn profile(&self) -> &Arc<PatternProfile> {
        &self.profile
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn seed_base(&self) -> u64 {
        self.seed_base
    }

    pub fn copies(&self) -> &[Sketch] {
        &self.copies
    }

    /// Applies one edge to every copy; returns the total number of terms
    /// summed across copies. Copies are independent, so the fan-out runs in
    /// parallel for large banks.
    pub fn update(&mut self, edge: &StreamEdge) -> Result<u64, BankError> {
        if self.copies.len() >= PARALLEL_THRESHOLD {
            let terms = self
                .copies
                .par_iter_mut()
                .map(|c| c.update(edge))
                .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
            Ok(terms)
        } else {
            let mut terms = 0u64;
            for c in &mut self.copies {
                terms += c.update(edge)?;
            }
            Ok(terms)
        }
    }

    /// The averaged estimate Z* = (1/s) sum of per-copy queries.
    pub fn estimate(&self) -> f64 {
        let sum: f64 = self.copies.iter().map(Sketch::query).sum();
        sum / self.copies.len() as f64
    }

    /// Per-copy query values, in copy order.
    pub fn copy_queries(&self) -> Vec<f64> {
        self.copies.iter().map(Sketch::query).collect()
    }

    /// Splits the copies into `groups` contiguous groups and returns the
    /// median of the group means. Amplifies the constant success
    /// probability of plain averaging; the default estimate remains the
    /// plain average.
    pub fn median_of_means(&self, groups: usize) -> Result<f64, BankError> {
        if groups == 0 || groups > self.copies.len() {
            return Err(BankError::InvalidParameter(format!(
                "group count {} must be in 1..={}",
                groups,
                self.copies.len()
            )));
        }
        let queries = self.copy_queries();
        let mut means: Vec<f64> = queries
            .chunks(queries.len().div_ceil(groups))
            .map(|chunk| chunk.iter().sum::<f64>() / chunk.len() as f64)
            .collect();
        means.sort_by(|a, b| a.total_cmp(b));
        let mid = means.len() / 2;
        Ok(if means.len() % 2 == 1 {
            means[mid]
        } else {
            (means[mid - 1] + means[mid]) / 2.0
        })
    }

    /// Unbiased sample variance of the per-copy query values.
    pub fn empirical_variance(&self) -> Result<f64, BankError> {
        if self.copies.len() < 2 {
            return Err(BankError::TooFewCopies);
        }
        let queries = self.copy_queries();
        let n = queries.len() as f64;
        let mean = queries.iter().sum::<f64>() / n;
        let ss: f64 = queries.iter().map(|q| (q - mean) * (q - mean)).sum();
        Ok(ss / (n - 1.0))
    }

    /// Copy-wise merge of two banks with identical (profile, seed_base, s).
    pub fn merge(&self, other: &EstimatorBank) -> Result<EstimatorBank, BankError> {
        if self.profile.fingerprint() != other.profile.fingerprint() {
            return Err(BankError::ConfigMismatch("different patterns".into()));
        }
        if self.seed_base != other.seed_base {
            return Err(BankError::ConfigMismatch(format!(
                "seed bases {} and {}",
                self.seed_base, other.seed_base
            )));
        }
        if self.copies.len() != other.copies.len() {
            return Err(BankError::ConfigMismatch(format!(
                "copy counts {} and {}",
                self.copies.len(),
                other.copies.len()
            )));
        }
        let copies = self
            .copies
            .iter()
            .zip(&other.copies)
            .map(|(a, b)| a.merge(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EstimatorBank {
            profile: Arc::clone(&self.profile),
            copies,
            seed_base: self.seed_base,
        })
    }
}

/// Recommended copy count and whether the clamp kicked in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CopyRecommendation {
    pub copies: u64,
    pub clamped: bool,
}

/// ceil(3 * m_bound^k / (eps^2 * count_lower_bound^2)), clamped to
/// [`MAX_RECOMMENDED_COPIES`]. The constant 3 makes the Chebyshev failure
/// bound at most 1/3; it is a heuristic stand-in for the unstated constant
/// of the asymptotic copy count.
pub fn recommend_copies(
    epsilon: f64,
    m_bound: u64,
    count_lower_bound: u64,
    profile: &PatternProfile,
) -> Result<CopyRecommendation, BankError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(BankError::InvalidEpsilon(epsilon));
    }
    if m_bound < 1 {
        return Err(BankError::InvalidParameter("m_bound must be >= 1".into()));
    }
    if count_lower_bound < 1 {
        return Err(BankError::InvalidParameter(
            "count_lower_bound must be >= 1".into(),
        ));
    }
    let m_pow = (m_bound as u128)
        .checked_pow(profile.k() as u32)
        .map(|p| p as f64)
        .unwrap_or(f64::INFINITY);
    let raw = 3.0 * m_pow / (epsilon * epsilon * (count_lower_bound as f64).powi(2));
    let ceiled = raw.ceil();
    if ceiled >= MAX_RECOMMENDED_COPIES as f64 {
        Ok(CopyRecommendation {
            copies: MAX_RECOMMENDED_COPIES,
            clamped: true,
        })
    } else {
        Ok(CopyRecommendation {
            copies: (ceiled as u64).max(1),
            clamped: false,
        })
    }
}

pub(crate) const BANK_MAGIC: &[u8; 4] = b"HCBK";
pub(crate) const BANK_FORMAT_VERSION: u16 = 1;

impl EstimatorBank {
    /// Bank file payload: magic "HCBK", format version, profile
    /// fingerprint, seed_base, s, then s concatenated sketch payloads.
    pub fn to_bytes(&self) -> Vec<u8> {
        let k = self.profile.k();
        let mut out =
            Vec::with_capacity(4 + 2 + 32 + 8 + 4 + self.copies.len() * crate::sketch::sketch_byte_len(k));
        out.extend_from_slice(BANK_MAGIC);
        out.extend_from_slice(&BANK_FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(self.profile.fingerprint());
        out.extend_from_slice(&self.seed_base.to_le_bytes());
        out.extend_from_slice(&(self.copies.len() as u32).to_le_bytes());
        for c in &self.copies {
            out.extend_from_slice(&c.to_bytes());
        }
        out
    }

    pub fn from_bytes(
        bytes: &[u8],
        profile: Arc<PatternProfile>,
    ) -> Result<EstimatorBank, BankError> {
        let header_len = 4 + 2 + 32 + 8 + 4;
        if bytes.len() < header_len {
            return Err(SketchError::CorruptPayload("truncated bank header".into()).into());
        }
        if &bytes[0..4] != BANK_MAGIC {
            return Err(SketchError::CorruptPayload("bad bank magic".into()).into());
        }
        let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        if version != BANK_FORMAT_VERSION {
            return Err(SketchError::VersionMismatch(version).into());
        }
        if &bytes[6..38] != profile.fingerprint() {
            return Err(SketchError::FingerprintMismatch.into());
        }
        let seed_base = u64::from_le_bytes(bytes[38..46].try_into().unwrap());
        let s = u32::from_le_bytes(bytes[46..50].try_into().unwrap()) as usize;
        if s == 0 {
            return Err(SketchError::CorruptPayload("bank has no copies".into()).into());
        }
        let sketch_len = crate::sketch::sketch_byte_len(profile.k());
        if bytes.len() != header_len + s * sketch_len {
            return Err(SketchError::CorruptPayload(format!(
                "expected {} bytes, got {}",
                header_len + s * sketch_len,
                bytes.len()
            ))
            .into());
        }
        let mut copies = Vec::with_capacity(s);
        for i in 0..s {
            let start = header_len + i * sketch_len;
            let sketch =
                Sketch::from_bytes(&bytes[start..start + sketch_len], Arc::clone(&profile))?;
            if sketch.seed() != seed_base.wrapping_add(i as u64) {
                return Err(SketchError::CorruptPayload(format!(
                    "copy {} has seed {} but seed base is {}",
                    i,
                    sketch.seed(),
                    seed_base
                ))
                .into());
            }
            copies.push(sketch);
        }
        Ok(EstimatorBank {
            profile,
            copies,
            seed_base,
        })
    }
}
