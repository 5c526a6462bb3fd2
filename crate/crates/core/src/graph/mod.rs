//! Finite simple graphs with a canonical edge order, plus orientations,
//! circulations, potentials and bipartite matchings over them.

mod circulation;
mod matching;
mod orientation;

pub use circulation::{
    is_circulation, potential_pairing, random_circulation, Circulation, Potential,
};
pub use matching::{matching_to_circulation, max_matching, Matching};
pub use orientation::{orientation_by_index, Direction, Orientation};

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Side of a bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => f.write_str("A"),
            Side::B => f.write_str("B"),
        }
    }
}

/// A simple undirected graph on `0..vertex_count`.
///
/// Edges are stored as `(low, high)` pairs in strictly increasing
/// lexicographic order; the position of an edge in that list is its
/// canonical index. Adjacency is kept in CSR form, each neighbor list sorted
/// by neighbor id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    bipartition: Option<Vec<Side>>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, usize)>,
}

impl FiniteGraph {
    /// Builds a graph from an edge list already in canonical order.
    pub fn new(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        bipartition: Option<Vec<Side>>,
    ) -> Result<Self> {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= v {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} = ({u}, {v}) is a loop or not written low-high"
                )));
            }
            if v >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} = ({u}, {v}) has an endpoint >= vertex_count {vertex_count}"
                )));
            }
            if i > 0 && edges[i - 1] >= (u, v) {
                return Err(Error::InvalidGraph(format!(
                    "edge list not strictly increasing at position {i}"
                )));
            }
        }
        if let Some(sides) = &bipartition {
            if sides.len() != vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "bipartition has {} labels for {vertex_count} vertices",
                    sides.len()
                )));
            }
            if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| sides[u] == sides[v]) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) lies inside side {}",
                    sides[u]
                )));
            }
        }

        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..vertex_count].to_vec();
        let mut adjacency = vec![(0, 0); offsets[vertex_count]];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adjacency[fill[u]] = (v, e);
            fill[u] += 1;
            adjacency[fill[v]] = (u, e);
            fill[v] += 1;
        }
        // Canonical edge order already sorts the lower-id neighbors of each
        // vertex before the higher ones, but interleaving can still occur.
        for v in 0..vertex_count {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
        }

        Ok(Self {
            vertex_count,
            edges,
            bipartition,
            offsets,
            adjacency,
        })
    }

    /// Builds a graph from edges in any order and orientation.
    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        bipartition: Option<Vec<Side>>,
    ) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "parallel edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Self::new(vertex_count, list, bipartition)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (usize, usize) {
        self.edges[index]
    }

    /// Canonical index of the edge `{u, v}`, if present.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// `(neighbor, edge index)` pairs of `v`, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// The common degree when every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let first = if self.vertex_count == 0 {
            return None;
        } else {
            self.degree(0)
        };
        (1..self.vertex_count)
            .all(|v| self.degree(v) == first)
            .then_some(first)
    }

    pub fn bipartition(&self) -> Option<&[Side]> {
        self.bipartition.as_deref()
    }

    pub fn side(&self, v: usize) -> Option<Side> {
        self.bipartition.as_ref().map(|s| s[v])
    }

    /// Replaces the side labels, validating that every edge crosses.
    pub fn with_bipartition(self, sides: Option<Vec<Side>>) -> Result<Self> {
        Self::new(self.vertex_count, self.edges, sides)
    }

    /// Number of neighbors of `v` inside the vertex set marked by `members`.
    pub fn degree_into(&self, v: usize, members: &[bool]) -> usize {
        self.neighbors(v).iter().filter(|&&(w, _)| members[w]).count()
    }

    /// Searches for an odd cycle by breadth-first 2-coloring, ignoring any
    /// stored bipartition. Returns an edge closing an odd cycle if one exists.
    pub fn find_odd_cycle_edge(&self) -> Option<(usize, usize)> {
        let mut color: Vec<Option<bool>> = vec![None; self.vertex_count];
        let mut queue = VecDeque::new();
        for start in 0..self.vertex_count {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &(w, _) in self.neighbors(u) {
                    match color[w] {
                        None => {
                            color[w] = Some(!cu);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cu => return Some((u.min(w), u.max(w))),
                        Some(_) => {}
                    }
                }
            }
        }
        None
    }

    /// Same graph with one edge deleted. Intended for negative-control
    /// checks of the verification harness.
    pub fn without_edge(&self, index: usize) -> Result<Self> {
        let mut edges = self.edges.clone();
        if index >= edges.len() {
            return Err(Error::NotAnEdge(format!("edge index {index}")));
        }
        edges.remove(index);
        Self::new(self.vertex_count, edges, self.bipartition.clone())
    }
}

/// The complete bipartite graph `K_{d,d}`: side A is `0..d`, side B is
/// `d..2d`.
pub fn make_complete_bipartite(d: usize) -> Result<FiniteGraph> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    let edges = (0..d).flat_map(|a| (d..2 * d).map(move |b| (a, b))).collect();
    let sides = (0..2 * d)
        .map(|v| if v < d { Side::A } else { Side::B })
        .collect();
    FiniteGraph::new(2 * d, edges, Some(sides))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complete_bipartite_sizes() {
        for (d, v, e) in [(1, 2, 1), (2, 4, 4), (3, 6, 9)] {
            let g = make_complete_bipartite(d).unwrap();
            assert_eq!(g.vertex_count(), v);
            assert_eq!(g.edge_count(), e);
            assert_eq!(g.regular_degree(), Some(d));
            assert!(g.bipartition().is_some());
        }
        assert!(matches!(make_complete_bipartite(0), Err(Error::ZeroDegree)));
    }

    #[test]
    fn rejects_malformed_edge_lists() {
        assert!(FiniteGraph::new(3, vec![(1, 1)], None).is_err());
        assert!(FiniteGraph::new(3, vec![(0, 3)], None).is_err());
        assert!(FiniteGraph::new(3, vec![(0, 2), (0, 1)], None).is_err());
        assert!(FiniteGraph::new(3, vec![(0, 1), (0, 1)], None).is_err());
        assert!(FiniteGraph::from_edges(3, [(1, 0), (0, 1)], None).is_err());
        let sides = vec![Side::A, Side::A, Side::B];
        assert!(FiniteGraph::new(3, vec![(0, 1)], Some(sides)).is_err());
    }

    #[test]
    fn from_edges_canonicalizes() {
        let g = FiniteGraph::from_edges(4, [(3, 1), (2, 0), (1, 0)], None).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 3)]);
        assert_eq!(g.edge_index(3, 1), Some(2));
        assert_eq!(g.neighbors(0), &[(1, 0), (2, 1)]);
    }

    #[test]
    fn odd_cycle_search() {
        let triangle = FiniteGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)], None).unwrap();
        assert!(triangle.find_odd_cycle_edge().is_some());
        let k33 = make_complete_bipartite(3).unwrap();
        assert!(k33.find_odd_cycle_edge().is_none());
    }

    fn random_graph() -> impl Strategy<Value = FiniteGraph> {
        (2usize..12)
            .prop_flat_map(|n| {
                let pairs: Vec<(usize, usize)> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .collect();
                let m = pairs.len();
                (Just(n), Just(pairs), proptest::collection::vec(any::<bool>(), m))
            })
            .prop_map(|(n, pairs, keep)| {
                let edges = pairs
                    .into_iter()
                    .zip(keep)
                    .filter_map(|(e, k)| k.then_some(e))
                    .collect();
                FiniteGraph::new(n, edges, None).unwrap()
            })
    }

    proptest! {
        // Finite counterpart of a measure-preserving edge set.
        #[test]
        fn handshake_between_subsets(
            g in random_graph(),
            a_bits in any::<u64>(),
            b_bits in any::<u64>(),
        ) {
            let n = g.vertex_count();
            let a: Vec<bool> = (0..n).map(|v| a_bits >> v & 1 == 1).collect();
            let b: Vec<bool> = (0..n).map(|v| b_bits >> v & 1 == 1).collect();
            let lhs: usize = (0..n).filter(|&v| a[v]).map(|v| g.degree_into(v, &b)).sum();
            let rhs: usize = (0..n).filter(|&v| b[v]).map(|v| g.degree_into(v, &a)).sum();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn adjacency_mirrors_edges(g in random_graph()) {
            let total: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
            prop_assert_eq!(total, 2 * g.edge_count());
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                prop_assert!(g.neighbors(u).contains(&(v, e)));
                prop_assert!(g.neighbors(v).contains(&(u, e)));
            }
        }
    }
}
