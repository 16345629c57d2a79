//! Clustered random graphs CRG(c, alpha).
//!
//! Vertices are partitioned into households of size `1 + Poisson(alpha c)`,
//! every household is a clique, and each pair of vertices in different
//! households is joined independently with probability `(1 - alpha) c / n`.

use crate::error::{domain, Result};
use crate::graph::{Graph, Vertex};
use crate::params::Params;
use crate::rng::RngStream;
use crate::sampling::poisson;

/// Household membership. Ids are assigned in creation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HouseholdPartition {
    /// Household id of each vertex.
    pub assignment: Vec<u32>,
    /// Size of each household.
    pub sizes: Vec<usize>,
    /// Vertices grouped by household: household `h` occupies
    /// `members[offset(h)..offset(h) + sizes[h]]`.
    members: Vec<Vertex>,
}

impl HouseholdPartition {
    pub fn household_count(&self) -> usize {
        self.sizes.len()
    }

    /// Iterator over the member lists, in household id order.
    pub fn households(&self) -> impl Iterator<Item = &[Vertex]> + '_ {
        let mut start = 0;
        self.sizes.iter().map(move |&s| {
            let slice = &self.members[start..start + s];
            start += s;
            slice
        })
    }

    pub fn same_household(&self, u: Vertex, v: Vertex) -> bool {
        self.assignment[u as usize] == self.assignment[v as usize]
    }
}

/// Sequential household formation.
///
/// Draw `s = 1 + Poisson(alpha c)`; if `s` does not exceed the number of
/// unassigned vertices, pick `s` of them uniformly at random as the next
/// household. The first draw that exceeds the remainder turns all remaining
/// vertices into the final household.
pub fn sample_households(params: &Params, rng: &mut RngStream) -> HouseholdPartition {
    let n = params.n;
    let mean = params.sigma2();
    let mut pool: Vec<Vertex> = (0..n as Vertex).collect();
    let mut assignment = vec![0u32; n];
    let mut sizes = Vec::new();
    let mut pos = 0;
    while pos < n {
        let remaining = n - pos;
        let size = (1 + poisson(mean, rng) as usize).min(remaining);
        let id = sizes.len() as u32;
        for _ in 0..size {
            let j = pos + rng.below((n - pos) as u64) as usize;
            pool.swap(pos, j);
            assignment[pool[pos] as usize] = id;
            pos += 1;
        }
        sizes.push(size);
    }
    HouseholdPartition {
        assignment,
        sizes,
        members: pool,
    }
}

/// Samples CRG(c, alpha) on `params.n` vertices.
pub fn sample_crg(params: &Params, rng: &mut RngStream) -> Result<Graph> {
    sample_crg_with_households(params, rng).map(|(g, _)| g)
}

/// Samples CRG(c, alpha) and also returns the household partition.
pub fn sample_crg_with_households(params: &Params, rng: &mut RngStream) -> Result<(Graph, HouseholdPartition)> {
    let p = params.global_edge_prob();
    if p > 1.0 {
        return Err(domain(format!(
            "global edge probability (1 - alpha) c / n = {p} exceeds 1; n = {} is too small",
            params.n
        )));
    }
    let households = sample_households(params, rng);
    let mut edges = Vec::new();
    for members in households.households() {
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                edges.push((u, v));
            }
        }
    }
    global_pairs(params.n, p, rng, |u, v| {
        if !households.same_household(u, v) {
            edges.push((u, v));
        }
    });
    let graph = Graph::from_edges(params.n, &edges)?;
    Ok((graph, households))
}

/// Visits every pair `(v, w)`, `w < v < n`, independently with probability
/// `p`, using geometric skips over the pair sequence in lexicographic order.
fn global_pairs<F: FnMut(Vertex, Vertex)>(n: usize, p: f64, rng: &mut RngStream, mut emit: F) {
    if p <= 0.0 || n < 2 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n as Vertex {
            for w in 0..v {
                emit(v, w);
            }
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let (mut v, mut w) = (1u64, 0u64);
    let mut first = true;
    let n = n as u64;
    loop {
        let skip = (rng.uniform_open0().ln() / log_q).floor() as u64;
        // Advance to the next selected pair: position moves by skip + 1,
        // except for the very first pair where it starts at (1, 0).
        w = w.saturating_add(if first { skip } else { skip.saturating_add(1) });
        first = false;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v >= n {
            return;
        }
        emit(v as Vertex, w as Vertex);
    }
}
