use crate::error::{Error, Result};

/// Vertex identifier. `u32` keeps adjacency compact for graphs up to ~4e9 vertices.
pub type Vertex = u32;

/// Immutable undirected simple graph in compressed sparse row form.
///
/// Neighbour lists are sorted, contain no duplicates and no self-loops, and
/// adjacency is symmetric. Positions on the unit torus are attached when the
/// graph came from the geometric generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
    positions: Option<Positions>,
}

/// Row-major point coordinates, `dim` values per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Positions {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl Positions {
    pub fn point(&self, v: usize) -> &[f64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl Graph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            positions: None,
        }
    }

    /// Builds a graph from an undirected edge list.
    ///
    /// Each edge may be given in either orientation but only once; self-loops,
    /// repeated edges and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0 as Vertex; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..n {
            let row = &mut targets[offsets[v]..offsets[v + 1]];
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({v}, {})", w[0])));
            }
        }
        Ok(Self {
            offsets,
            targets,
            positions: None,
        })
    }

    pub fn with_positions(mut self, positions: Positions) -> Result<Self> {
        if positions.dim == 0 || positions.coords.len() != positions.dim * self.n() {
            return Err(Error::InvalidGraph(format!(
                "expected {} points of dimension {}, got {} coordinates",
                self.n(),
                positions.dim,
                positions.coords.len()
            )));
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[Vertex] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as Vertex)).is_ok()
    }

    pub fn positions(&self) -> Option<&Positions> {
        self.positions.as_ref()
    }

    /// Edges `(u, v)` with `u < v`, in increasing lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u as Vertex, v))
        })
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.n() as f64
    }

    /// Full scan of the structural invariants: sorted rows, no self-loops,
    /// no duplicates, symmetric adjacency.
    pub fn validate(&self) -> Result<()> {
        for u in 0..self.n() {
            let row = self.neighbors(u);
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidGraph(format!("row {u} not strictly increasing")));
                }
            }
            for &v in row {
                if v as usize == u {
                    return Err(Error::InvalidGraph(format!("self-loop at {u}")));
                }
                if !self.has_edge(v as usize, u) {
                    return Err(Error::InvalidGraph(format!("edge ({u}, {v}) has no reverse")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_sorted_symmetric_rows() {
        let g = Graph::from_edges(4, &[(2, 0), (0, 1), (3, 0), (1, 2)]).unwrap();
        g.validate().unwrap();
        assert_eq!(g.neighbors(0), &[1, 2, 3]);
        assert_eq!(g.neighbors(3), &[0]);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (0, 3), (1, 2)]);
        assert!(g.has_edge(2, 1) && !g.has_edge(2, 3));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn empty_graph() {
        let g = Graph::empty(5);
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.degree(4), 0);
        g.validate().unwrap();
    }

    #[test]
    fn positions_must_match_n() {
        let g = Graph::empty(2);
        let bad = Positions {
            dim: 2,
            coords: vec![0.0; 3],
        };
        assert!(g.clone().with_positions(bad).is_err());
        let ok = Positions {
            dim: 2,
            coords: vec![0.1, 0.2, 0.3, 0.4],
        };
        let g = g.with_positions(ok).unwrap();
        assert_eq!(g.positions().unwrap().point(1), &[0.3, 0.4]);
    }
}
