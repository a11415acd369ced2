//! Pattern hypergraphs: validation, preprocessing, automorphism counting and
//! the exact brute-force occurrence counter used as the testing oracle.

use std::collections::BTreeSet;

use num_rational::Ratio;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::permute::for_each_permutation;

/// Vertex identifiers must stay below the hash field prime so they can be
/// used directly as field elements.
pub const MAX_VERTEX_ID: u64 = crate::hashing::FIELD_PRIME - 1;

/// Size limits for pattern preprocessing. `tau = 2^t - 1` must fit in 64
/// bits with headroom and per-edge permutation fan-out (`size!`) must stay
/// tractable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_pattern_vertices: usize,
    pub max_edge_size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pattern_vertices: 16,
            max_edge_size: 8,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),
    #[error("vertex {0} is isolated (degree 0)")]
    IsolatedVertex(u64),
    #[error("pattern too large: {0}")]
    TooLarge(String),
}

/// An explicit small hypergraph: an ordered vertex set plus a list of
/// canonical edges. Each edge is stored strictly increasing and no two
/// edges are equal as sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: BTreeSet<u64>,
    edges: Vec<Vec<u64>>,
}

impl Hypergraph {
    /// Builds a hypergraph from an explicit vertex set and edge list.
    /// Edges are canonicalized (sorted ascending); duplicate vertices
    /// within an edge, empty edges, edges using unknown vertices and
    /// repeated edges are rejected.
    pub fn new(
        vertices: impl IntoIterator<Item = u64>,
        edges: Vec<Vec<u64>>,
    ) -> Result<Self, PatternError> {
        let vertices: BTreeSet<u64> = vertices.into_iter().collect();
        let mut canonical = Vec::with_capacity(edges.len());
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        for mut edge in edges {
            if edge.is_empty() {
                return Err(PatternError::InvalidHypergraph("empty edge".into()));
            }
            edge.sort_unstable();
            if edge.windows(2).any(|w| w[0] == w[1]) {
                return Err(PatternError::InvalidHypergraph(format!(
                    "duplicate vertex in edge {:?}",
                    edge
                )));
            }
            if let Some(&v) = edge.iter().find(|v| !vertices.contains(v)) {
                return Err(PatternError::InvalidHypergraph(format!(
                    "edge vertex {} not in vertex set",
                    v
                )));
            }
            if !seen.insert(edge.clone()) {
                return Err(PatternError::InvalidHypergraph(format!(
                    "repeated edge {:?}",
                    edge
                )));
            }
            canonical.push(edge);
        }
        Ok(Hypergraph {
            vertices,
            edges: canonical,
        })
    }

    /// Builds a hypergraph whose vertex set is the union of the edges.
    pub fn from_edges(edges: Vec<Vec<u64>>) -> Result<Self, PatternError> {
        let vertices: BTreeSet<u64> = edges.iter().flatten().copied().collect();
        Hypergraph::new(vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u64> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> &[Vec<u64>] {
        &self.edges
    }

    pub fn degree(&self, v: u64) -> usize {
        self.edges.iter().filter(|e| e.binary_search(&v).is_ok()).count()
    }

    fn edge_set(&self) -> BTreeSet<&[u64]> {
        self.edges.iter().map(|e| e.as_slice()).collect()
    }
}

/// Preprocessed pattern H: everything the estimator needs per query that
/// does not depend on the randomness. `scale` is the exact rational
/// `t^t / (t! * auto(H))` applied at query time; `exponent_modulus` is
/// `D = tau * lcm(deg(c))`, the common denominator that makes every term
/// exponent an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternProfile {
    t: usize,
    k: usize,
    tau: u64,
    vertices: Vec<u64>,
    degrees: Vec<u32>,
    oriented_edges: Vec<Vec<u64>>,
    edge_vertex_indices: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    auto: u64,
    scale: Ratio<u128>,
    degree_lcm: u64,
    exponent_modulus: u64,
    x_strides: Vec<Vec<u64>>,
    q_strides: Vec<Vec<u64>>,
    fingerprint: [u8; 32],
    limits: Limits,
}

impl PatternProfile {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    /// Pattern vertices in ascending id order; hash and degree vectors are
    /// aligned with this order.
    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree_of(&self, vertex: u64) -> Option<u32> {
        self.vertex_index(vertex).map(|i| self.degrees[i])
    }

    pub fn vertex_index(&self, vertex: u64) -> Option<usize> {
        self.vertices.binary_search(&vertex).ok()
    }

    /// The fixed orientation of each pattern edge: ascending vertex order.
    pub fn oriented_edges(&self) -> &[Vec<u64>] {
        &self.oriented_edges
    }

    /// Oriented edges with vertices replaced by their index into
    /// [`PatternProfile::vertices`].
    pub fn oriented_edge_indices(&self) -> &[Vec<usize>] {
        &self.edge_vertex_indices
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn auto(&self) -> u64 {
        self.auto
    }

    /// Exact query scale `t^t / (t! * auto(H))` as a reduced rational.
    pub fn scale(&self) -> Ratio<u128> {
        self.scale
    }

    pub fn scale_f64(&self) -> f64 {
        *self.scale.numer() as f64 / *self.scale.denom() as f64
    }

    pub fn degree_lcm(&self) -> u64 {
        self.degree_lcm
    }

    /// D = tau * degree_lcm.
    pub fn exponent_modulus(&self) -> u64 {
        self.exponent_modulus
    }

    /// `D / deg(c)` for position `i` of oriented edge `j`.
    pub(crate) fn x_stride(&self, edge: usize, position: usize) -> u64 {
        self.x_strides[edge][position]
    }

    /// `degree_lcm / deg(c)` for position `i` of oriented edge `j`.
    pub(crate) fn q_stride(&self, edge: usize, position: usize) -> u64 {
        self.q_strides[edge][position]
    }

    pub fn fingerprint(&self) -> &[u8; 32] {
        &self.fingerprint
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn min_degree(&self) -> u32 {
        self.degrees.iter().copied().min().unwrap_or(0)
    }
}

/// Preprocesses a pattern with the default [`Limits`].
pub fn build_pattern_profile(h: &Hypergraph) -> Result<PatternProfile, PatternError> {
    build_pattern_profile_with(h, Limits::default())
}

/// Preprocesses a pattern: degrees, the fixed ascending edge orientations,
/// automorphism count, the exact query scale and the integer-exponent
/// strides used by the sketch update.
pub fn build_pattern_profile_with(
    h: &Hypergraph,
    limits: Limits,
) -> Result<PatternProfile, PatternError> {
    if h.edge_count() == 0 {
        return Err(PatternError::InvalidHypergraph(
            "pattern has no edges".into(),
        ));
    }
    let t = h.vertex_count();
    if t > limits.max_pattern_vertices {
        return Err(PatternError::TooLarge(format!(
            "{} vertices exceeds limit {}",
            t, limits.max_pattern_vertices
        )));
    }
    if let Some(e) = h.edges().iter().find(|e| e.len() > limits.max_edge_size) {
        return Err(PatternError::TooLarge(format!(
            "edge of size {} exceeds limit {}",
            e.len(),
            limits.max_edge_size
        )));
    }

    let vertices: Vec<u64> = h.vertices().collect();
    let degrees: Vec<u32> = vertices.iter().map(|&v| h.degree(v) as u32).collect();
    if let Some(i) = degrees.iter().position(|&d| d == 0) {
        return Err(PatternError::IsolatedVertex(vertices[i]));
    }

    let k = h.edge_count();
    let tau = (1u64 << t) - 1;
    let auto = count_automorphisms_with(h, limits)?;

    let t_pow: u128 = (t as u128).pow(t as u32);
    let t_fact: u128 = (1..=t as u128).product();
    let scale = Ratio::new(t_pow, t_fact * auto as u128);

    let mut degree_lcm: u64 = 1;
    for &d in &degrees {
        degree_lcm = checked_lcm(degree_lcm, d as u64).ok_or_else(|| {
            PatternError::TooLarge("lcm of degrees overflows u64".into())
        })?;
    }
    let exponent_modulus = tau
        .checked_mul(degree_lcm)
        .ok_or_else(|| PatternError::TooLarge("exponent modulus overflows u64".into()))?;

    let oriented_edges = h.edges().to_vec();
    let edge_vertex_indices: Vec<Vec<usize>> = oriented_edges
        .iter()
        .map(|e| {
            e.iter()
                .map(|v| vertices.binary_search(v).expect("edge vertex in vertex set"))
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = oriented_edges.iter().map(|e| e.len()).collect();

    let x_strides: Vec<Vec<u64>> = edge_vertex_indices
        .iter()
        .map(|e| {
            e.iter()
                .map(|&c| exponent_modulus / degrees[c] as u64)
                .collect()
        })
        .collect();
    let q_strides: Vec<Vec<u64>> = edge_vertex_indices
        .iter()
        .map(|e| e.iter().map(|&c| degree_lcm / degrees[c] as u64).collect())
        .collect();

    let fingerprint = fingerprint(t, &vertices, &oriented_edges);

    Ok(PatternProfile {
        t,
        k,
        tau,
        vertices,
        degrees,
        oriented_edges,
        edge_vertex_indices,
        sizes,
        auto,
        scale,
        degree_lcm,
        exponent_modulus,
        x_strides,
        q_strides,
        fingerprint,
        limits,
    })
}

fn fingerprint(t: usize, vertices: &[u64], edges: &[Vec<u64>]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(b"hypercount-profile-v1");
    hasher.update((t as u64).to_le_bytes());
    hasher.update((vertices.len() as u64).to_le_bytes());
    for &v in vertices {
        hasher.update(v.to_le_bytes());
    }
    hasher.update((edges.len() as u64).to_le_bytes());
    for e in edges {
        hasher.update((e.len() as u64).to_le_bytes());
        for &v in e {
            hasher.update(v.to_le_bytes());
        }
    }
    hasher.finalize().into()
}

fn checked_lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    let g = num_integer::gcd(a, b);
    (a / g).checked_mul(b)
}

/// Exhaustively counts the automorphisms of `h` over all `t!` vertex
/// permutations. A permutation is an automorphism iff it maps the edge
/// set onto itself.
pub fn count_automorphisms(h: &Hypergraph) -> Result<u64, PatternError> {
    count_automorphisms_with(h, Limits::default())
}

pub fn count_automorphisms_with(h: &Hypergraph, limits: Limits) -> Result<u64, PatternError> {
    let t = h.vertex_count();
    if t > limits.max_pattern_vertices {
        return Err(PatternError::TooLarge(format!(
            "{} vertices exceeds limit {}",
            t, limits.max_pattern_vertices
        )));
    }
    if t == 0 {
        return Ok(1);
    }
    let vertices: Vec<u64> = h.vertices().collect();
    let edge_set = h.edge_set();
    let mut count = 0u64;
    for_each_permutation(t, |perm| {
        let is_auto = h.edges().iter().all(|e| {
            let mut mapped: Vec<u64> = e
                .iter()
                .map(|v| {
                    let i = vertices.binary_search(v).expect("vertex present");
                    vertices[perm[i]]
                })
                .collect();
            mapped.sort_unstable();
            edge_set.contains(mapped.as_slice())
        });
        if is_auto {
            count += 1;
        }
    });
    Ok(count)
}

/// Exact number of occurrences of `h` in `g`: injective vertex maps
/// carrying every edge of `h` into `g`, divided by `auto(h)`. Brute force
/// with backtracking; intended for desk-scale verification only.
pub fn exact_count(h: &Hypergraph, g: &Hypergraph) -> Result<u64, PatternError> {
    let h_vertices: Vec<u64> = h.vertices().collect();
    if let Some(&v) = h_vertices.iter().find(|&&v| h.degree(v) == 0) {
        return Err(PatternError::IsolatedVertex(v));
    }
    if h.edge_count() == 0 {
        return Err(PatternError::InvalidHypergraph(
            "pattern has no edges".into(),
        ));
    }
    let t = h_vertices.len();
    let g_vertices: Vec<u64> = g.vertices().collect();
    if t > g_vertices.len() {
        return Ok(0);
    }

    let g_edges = g.edge_set();
    // Edges of h grouped by the deepest assignment level that completes them,
    // so each edge is checked as soon as all its vertices are mapped.
    let h_edge_indices: Vec<Vec<usize>> = h
        .edges()
        .iter()
        .map(|e| {
            e.iter()
                .map(|v| h_vertices.binary_search(v).expect("vertex present"))
                .collect()
        })
        .collect();
    let mut edges_by_level: Vec<Vec<&[usize]>> = vec![Vec::new(); t];
    for e in &h_edge_indices {
        let last = *e.iter().max().expect("non-empty edge");
        edges_by_level[last].push(e.as_slice());
    }

    let mut assignment = vec![0u64; t];
    let mut used = vec![false; g_vertices.len()];
    let homs = count_injective_maps(
        0,
        &mut assignment,
        &mut used,
        &g_vertices,
        &edges_by_level,
        &g_edges,
    );

    let auto = count_automorphisms(h)?;
    debug_assert_eq!(homs % auto, 0, "orbit count must divide hom count");
    Ok(homs / auto)
}

fn count_injective_maps(
    level: usize,
    assignment: &mut [u64],
    used: &mut [bool],
    g_vertices: &[u64],
    edges_by_level: &[Vec<&[usize]>],
    g_edges: &BTreeSet<&[u64]>,
) -> u64 {
    if level == assignment.len() {
        return 1;
    }
    let mut total = 0;
    for (gi, &gv) in g_vertices.iter().enumerate() {
        if used[gi] {
            continue;
        }
        assignment[level] = gv;
        let ok = edges_by_level[level].iter().all(|e| {
            let mut mapped: Vec<u64> = e.iter().map(|&i| assignment[i]).collect();
            mapped.sort_unstable();
            g_edges.contains(mapped.as_slice())
        });
        if ok {
            used[gi] = true;
            total += count_injective_maps(
                level + 1,
                assignment,
                used,
                g_vertices,
                edges_by_level,
                g_edges,
            );
            used[gi] = false;
        }
    }
    total
}
