//! Random sequential adsorption on an explicit graph: vertices are activated
//! in uniformly random order among those not yet blocked, and every
//! activation blocks its neighbourhood. The final active set is a maximal
//! independent set.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::rng::RngStream;

/// Largest graph accepted by [`exact_expected_jam`].
pub const EXACT_MAX_VERTICES: usize = 10;

/// The jammed configuration of one RSA run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JamResult {
    /// Active vertices in activation order. Empty when the run did not
    /// materialise a graph (the exploration sampler).
    pub active: Vec<Vertex>,
    pub jam_count: usize,
    pub jam_fraction: f64,
}

impl JamResult {
    pub fn from_count(jam_count: usize, n: usize) -> Self {
        Self {
            active: Vec::new(),
            jam_count,
            jam_fraction: jam_count as f64 / n as f64,
        }
    }
}

/// Runs RSA on `graph`.
///
/// A uniform random permutation is scanned once and each vertex is activated
/// iff none of its neighbours is already active; this has the same law as
/// repeatedly activating a uniform unblocked vertex.
pub fn greedy_jam(graph: &Graph, rng: &mut RngStream) -> JamResult {
    let n = graph.n();
    let mut order: Vec<Vertex> = (0..n as Vertex).collect();
    rng.shuffle(&mut order);
    let mut blocked = vec![false; n];
    let mut active = Vec::new();
    for v in order {
        if blocked[v as usize] {
            continue;
        }
        blocked[v as usize] = true;
        for &u in graph.neighbors(v as usize) {
            blocked[u as usize] = true;
        }
        active.push(v);
    }
    let jam_count = active.len();
    JamResult {
        active,
        jam_count,
        jam_fraction: jam_count as f64 / n as f64,
    }
}

/// Activation in a fixed order; the deterministic core of [`greedy_jam`].
pub fn jam_in_order(graph: &Graph, order: &[Vertex]) -> usize {
    let mut blocked = vec![false; graph.n()];
    let mut count = 0;
    for &v in order {
        if !blocked[v as usize] {
            blocked[v as usize] = true;
            graph
                .neighbors(v as usize)
                .iter()
                .for_each(|&u| blocked[u as usize] = true);
            count += 1;
        }
    }
    count
}

/// True when no edge joins two members of `set`.
pub fn is_independent(graph: &Graph, set: &[Vertex]) -> bool {
    let mut member = vec![false; graph.n()];
    set.iter().for_each(|&v| member[v as usize] = true);
    set.iter()
        .all(|&v| graph.neighbors(v as usize).iter().all(|&u| !member[u as usize]))
}

/// True when every vertex outside `set` has a neighbour inside it.
pub fn is_maximal(graph: &Graph, set: &[Vertex]) -> bool {
    let mut member = vec![false; graph.n()];
    set.iter().for_each(|&v| member[v as usize] = true);
    (0..graph.n()).all(|v| member[v] || graph.neighbors(v).iter().any(|&u| member[u as usize]))
}

/// Exact expected jam count of RSA on a graph with at most
/// [`EXACT_MAX_VERTICES`] vertices.
///
/// `E[S] = (1/|S|) * sum_{v in S} (1 + E[S \ N[v]])` over the set `S` of
/// unblocked vertices, evaluated bottom-up over all bitmasks.
pub fn exact_expected_jam(graph: &Graph) -> Result<f64> {
    let n = graph.n();
    if n > EXACT_MAX_VERTICES {
        return Err(Error::Size(format!(
            "exact jam expectation supports at most {EXACT_MAX_VERTICES} vertices, got {n}"
        )));
    }
    let closed: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(1u32 << v, |m, &u| m | (1 << u)))
        .collect();
    let mut expect = vec![0.0f64; 1 << n];
    // Removing a closed neighbourhood only clears bits, so every successor
    // mask is numerically smaller and already computed.
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as f64;
        let mut total = 0.0;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += 1.0 + expect[(mask & !closed[v]) as usize];
        }
        expect[mask as usize] = total / size;
    }
    Ok(expect[(1usize << n) - 1])
}
