//! Random geometric graphs on the unit torus `[0,1)^d`.
//!
//! `n` points are placed uniformly at random and two points are joined when
//! their torus distance is at most `2r`, with `r` chosen so that
//! `n * V_d(2r) = c`; the expected degree is then `c (n - 1) / n`.
//!
//! Neighbour search uses a cell list with cells of side at least `2r`, so only
//! the `3^d` surrounding cells (with wrap-around) are scanned. With fewer than
//! three cells per axis the block would wrap onto itself and the generator
//! falls back to testing all pairs.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::graph::{Graph, Positions, Vertex};
use crate::params::Params;
use crate::rng::RngStream;
use crate::special::ln_gamma;

/// Points on the unit torus; every coordinate lies in `[0, 1)`.
pub type TorusPointSet = Positions;

/// Volume of the `d`-ball of the given radius.
pub fn ball_volume(d: usize, radius: f64) -> f64 {
    let d = d as f64;
    (0.5 * d * PI.ln() + d * radius.ln() - ln_gamma(1.0 + 0.5 * d)).exp()
}

/// Sphere radius `r` for which the connection ball of radius `2r` has volume `c / n`.
pub fn radius_for(n: usize, c: f64, d: usize) -> Result<f64> {
    if n < 1 || d < 1 {
        return Err(domain("radius_for needs n >= 1 and d >= 1"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(domain(format!("radius_for needs c > 0, got {c}")));
    }
    let d = d as f64;
    let ln_r2 = (c.ln() + ln_gamma(1.0 + 0.5 * d) - (n as f64).ln() - 0.5 * d * PI.ln()) / d;
    Ok(0.5 * ln_r2.exp())
}

/// Euclidean length of the per-coordinate wrapped difference.
#[inline]
pub fn torus_distance(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    p.iter()
        .zip(q)
        .map(|(a, b)| {
            let delta = (a - b).abs();
            let w = delta.min(1.0 - delta);
            w * w
        })
        .sum::<f64>()
        .sqrt()
}

/// `n` i.i.d. uniform points in `[0,1)^d`, coordinates drawn point by point.
pub fn sample_points(n: usize, d: usize, rng: &mut RngStream) -> TorusPointSet {
    let coords = (0..n * d).map(|_| rng.uniform()).collect();
    Positions { dim: d, coords }
}

/// Samples RGG(c, d) on `params.n` vertices. For `c = 0` the graph is empty
/// (positions are still drawn).
pub fn sample_rgg(params: &Params, rng: &mut RngStream) -> Result<Graph> {
    let points = sample_points(params.n, params.d, rng);
    if params.c == 0.0 {
        return Graph::empty(params.n).with_positions(points);
    }
    let threshold = 2.0 * radius_for(params.n, params.c, params.d)?;
    geometric_graph(points, threshold)
}

/// Graph on the given points with an edge whenever `torus_distance <= threshold`.
pub fn geometric_graph(points: TorusPointSet, threshold: f64) -> Result<Graph> {
    let edges = match cells_per_axis(points.len(), points.dim, threshold) {
        Some(m) => cell_list_edges(&points, threshold, m),
        None => brute_force_edges(&points, threshold),
    };
    Graph::from_edges(points.len(), &edges)?.with_positions(points)
}

/// All-pairs reference construction.
pub fn geometric_graph_brute_force(points: TorusPointSet, threshold: f64) -> Result<Graph> {
    let edges = brute_force_edges(&points, threshold);
    Graph::from_edges(points.len(), &edges)?.with_positions(points)
}

fn cells_per_axis(n: usize, d: usize, threshold: f64) -> Option<usize> {
    if !(threshold > 0.0) || threshold.is_nan() {
        return None;
    }
    let by_radius = (1.0 / threshold).floor();
    // Keep the number of cells O(n) so sparse huge-d inputs stay cheap.
    let by_count = (2.0 * n as f64).powf(1.0 / d as f64).floor();
    let m = by_radius.min(by_count);
    (m >= 3.0).then_some(m as usize)
}

fn brute_force_edges(points: &TorusPointSet, threshold: f64) -> Vec<(Vertex, Vertex)> {
    let n = points.len();
    let mut edges = Vec::new();
    for u in 0..n {
        let pu = points.point(u);
        for v in u + 1..n {
            if torus_distance(pu, points.point(v)) <= threshold {
                edges.push((u as Vertex, v as Vertex));
            }
        }
    }
    edges
}

fn cell_list_edges(points: &TorusPointSet, threshold: f64, m: usize) -> Vec<(Vertex, Vertex)> {
    let n = points.len();
    let d = points.dim;
    let total_cells = m.pow(d as u32);

    let cell_of = |p: &[f64]| {
        p.iter().rev().fold(0usize, |acc, &x| {
            let c = ((x * m as f64) as usize).min(m - 1);
            acc * m + c
        })
    };

    // Bucket points by cell (CSR layout, points ascending within a cell).
    let mut start = vec![0usize; total_cells + 1];
    let cells: Vec<usize> = (0..n).map(|v| cell_of(points.point(v))).collect();
    for &c in &cells {
        start[c + 1] += 1;
    }
    for i in 0..total_cells {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut members = vec![0 as Vertex; n];
    for (v, &c) in cells.iter().enumerate() {
        members[fill[c]] = v as Vertex;
        fill[c] += 1;
    }

    // Offsets of the 3^d block, as per-axis steps in {m-1, 0, 1} (mod m).
    let block = 3usize.pow(d as u32);
    let steps: Vec<Vec<usize>> = (0..block)
        .map(|mut code| {
            (0..d)
                .map(|_| {
                    let s = [m - 1, 0, 1][code % 3];
                    code /= 3;
                    s
                })
                .collect()
        })
        .collect();

    let mut edges = Vec::with_capacity(n * 8);
    let mut coord = vec![0usize; d];
    for cell in 0..total_cells {
        let here = &members[start[cell]..start[cell + 1]];
        if here.is_empty() {
            continue;
        }
        let mut rest = cell;
        for c in coord.iter_mut() {
            *c = rest % m;
            rest /= m;
        }
        for step in &steps {
            let other = coord
                .iter()
                .zip(step)
                .rev()
                .fold(0usize, |acc, (&c, &s)| acc * m + (c + s) % m);
            let there = &members[start[other]..start[other + 1]];
            for &u in here {
                let pu = points.point(u as usize);
                for &v in there {
                    if v > u && torus_distance(pu, points.point(v as usize)) <= threshold {
                        edges.push((u, v));
                    }
                }
            }
        }
    }
    edges
}
