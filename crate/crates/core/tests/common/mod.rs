//! Shared helpers for the integration suites: a deterministic RNG, random
//! pattern/stream generators, and a reference implementation of the
//! estimator written straight from the update and query formulas. The
//! reference multiplies the unit factors of each term numerically and
//! enumerates orientations with its own recursive generator, so it shares
//! no code with the integer-exponent production path it checks.

#![allow(dead_code)]

use std::f64::consts::TAU;
use std::sync::Arc;

use hypercount_core::{
    build_pattern_profile, Complex64, Hypergraph, PatternProfile, RandomBasis, Sign, Sketch,
    StreamEdge,
};

/// splitmix64 stepping; deterministic across runs and platforms.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut x = self.0;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        x ^ (x >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

pub fn triangle() -> Hypergraph {
    Hypergraph::from_edges(vec![vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap()
}

pub fn triangle_profile() -> Arc<PatternProfile> {
    Arc::new(build_pattern_profile(&triangle()).unwrap())
}

pub fn complete_graph_edges(n: u64) -> Vec<Vec<u64>> {
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in (a + 1)..=n {
            edges.push(vec![a, b]);
        }
    }
    edges
}

pub fn insert_stream(edges: &[Vec<u64>]) -> Vec<StreamEdge> {
    edges
        .iter()
        .map(|e| StreamEdge::insert(e.clone()).unwrap())
        .collect()
}

/// A random pattern with `t` at most `max_t`: a nonempty set of distinct
/// edges over a small vertex range; the vertex set is the edge union, so
/// the minimum degree is at least 1 by construction.
pub fn random_pattern(rng: &mut TestRng, max_t: u64) -> Hypergraph {
    loop {
        let t = 2 + rng.below(max_t - 1);
        let edge_count = 1 + rng.below(4);
        let mut edges: Vec<Vec<u64>> = Vec::new();
        for _ in 0..edge_count {
            let size = 2 + rng.below(t.min(3) - 1);
            let mut edge: Vec<u64> = Vec::new();
            while (edge.len() as u64) < size {
                let v = 1 + rng.below(t);
                if !edge.contains(&v) {
                    edge.push(v);
                }
            }
            edge.sort_unstable();
            if !edges.contains(&edge) {
                edges.push(edge);
            }
        }
        if !edges.is_empty() {
            return Hypergraph::from_edges(edges).unwrap();
        }
    }
}

/// A random signed stream over small vertex ids.
pub fn random_stream(rng: &mut TestRng, len: usize, max_size: u64, universe: u64) -> Vec<StreamEdge> {
    let mut stream = Vec::with_capacity(len);
    for _ in 0..len {
        let size = 1 + rng.below(max_size);
        let mut vertices: Vec<u64> = Vec::new();
        while (vertices.len() as u64) < size {
            let v = rng.below(universe);
            if !vertices.contains(&v) {
                vertices.push(v);
            }
        }
        let sign = if rng.below(4) == 0 {
            Sign::Delete
        } else {
            Sign::Insert
        };
        stream.push(StreamEdge::new(sign, vertices).unwrap());
    }
    stream
}

fn permutations_rec(n: usize) -> Vec<Vec<usize>> {
    fn go(remaining: &mut Vec<usize>, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(current.clone());
            return;
        }
        for i in 0..remaining.len() {
            let item = remaining.remove(i);
            current.push(item);
            go(remaining, current, out);
            current.pop();
            remaining.insert(i, item);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// M as a numeric product of the l unit factors
/// X_c(u) * Q^(Y(u)/deg(c)), one complex multiplication per factor.
pub fn reference_term(
    profile: &PatternProfile,
    basis: &RandomBasis,
    edge_index: usize,
    tuple: &[u64],
) -> Complex64 {
    let mut m = Complex64::new(1.0, 0.0);
    for (i, &u) in tuple.iter().enumerate() {
        let c = profile.oriented_edges()[edge_index][i];
        let deg = profile.degree_of(c).unwrap() as f64;
        let x_angle = TAU * basis.x_exponent(c, u).unwrap() as f64 / deg;
        let q_angle = TAU * basis.q_exponent() as f64 * basis.y_value(u) as f64
            / (profile.tau() as f64 * deg);
        m *= Complex64::new(x_angle.cos(), x_angle.sin());
        m *= Complex64::new(q_angle.cos(), q_angle.sin());
    }
    m
}

/// Accumulators recomputed straight from the update rule over a recorded
/// stream.
pub fn reference_accumulators(
    profile: &PatternProfile,
    basis: &RandomBasis,
    stream: &[StreamEdge],
) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); profile.k()];
    for edge in stream {
        for (j, pattern_edge) in profile.oriented_edges().iter().enumerate() {
            if pattern_edge.len() != edge.size() {
                continue;
            }
            let mut local = Complex64::new(0.0, 0.0);
            for perm in permutations_rec(edge.size()) {
                let tuple: Vec<u64> = perm.iter().map(|&i| edge.vertices()[i]).collect();
                local += reference_term(profile, basis, j, &tuple);
            }
            acc[j] += edge.sign().factor() * local;
        }
    }
    acc
}

/// Re(scale * prod of accumulators), straight from the query formula.
pub fn reference_query(profile: &PatternProfile, accumulators: &[Complex64]) -> f64 {
    let product = accumulators
        .iter()
        .fold(Complex64::new(1.0, 0.0), |a, z| a * z);
    profile.scale_f64() * product.re
}

/// Runs a stream through a fresh sketch.
pub fn sketch_of_stream(profile: &Arc<PatternProfile>, seed: u64, stream: &[StreamEdge]) -> Sketch {
    let mut s = Sketch::new(Arc::clone(profile), seed);
    for e in stream {
        s.update(e).unwrap();
    }
    s
}

pub fn mean_and_sample_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}
