//! Turnstile-streaming (1 +- eps)-approximation of the number of
//! occurrences of a constant-size pattern hypergraph H in a streamed
//! hypergraph G, using a complex-valued linear sketch.
//!
//! The pipeline: preprocess the pattern into a [`pattern::PatternProfile`],
//! derive per-copy randomness with [`hashing::derive_basis`], feed signed
//! edges into a [`sketch::Sketch`] or a multi-copy [`bank::EstimatorBank`],
//! and query the averaged estimate. Sketches are linear: insertions and
//! deletions cancel, and sketches of stream shards merge componentwise.
//! [`pattern::exact_count`] is the brute-force oracle used to verify the
//! estimator at desk scale.

pub mod bank;
pub mod hashing;
pub mod pattern;
mod permute;
pub mod sketch;

pub use bank::{recommend_copies, BankError, CopyRecommendation, EstimatorBank};
pub use num_complex::Complex64;
pub use hashing::{derive_basis, HashError, KWiseHash, RandomBasis, FIELD_PRIME};
pub use pattern::{
    build_pattern_profile, build_pattern_profile_with, count_automorphisms, exact_count,
    Hypergraph, Limits, PatternError, PatternProfile, MAX_VERTEX_ID,
};
pub use sketch::{term_exponent, Sign, Sketch, SketchError, StreamEdge};
