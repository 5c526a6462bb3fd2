use num_bigint::BigUint;
use num_traits::Zero;

use super::FiniteGraph;
use crate::error::{Error, Result};

/// Direction of an ordered vertex pair relative to an orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// The edge is directed from the first vertex of the pair to the second.
    Forward,
    /// The edge is directed from the second vertex to the first.
    Reverse,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

/// One direction bit per canonical edge: `false` directs the edge from its
/// lower endpoint to its higher one, `true` reverses it.
///
/// The index of an orientation in `Ori(G)` is the integer whose binary digit
/// `i` is the bit of canonical edge `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orientation {
    reversed: Vec<bool>,
}

impl Orientation {
    pub fn from_bits(reversed: Vec<bool>) -> Self {
        Self { reversed }
    }

    /// Every edge directed low to high (index 0).
    pub fn low_to_high(edge_count: usize) -> Self {
        Self {
            reversed: vec![false; edge_count],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.reversed.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.reversed
    }

    pub fn is_reversed(&self, edge: usize) -> bool {
        self.reversed[edge]
    }

    pub fn set_reversed(&mut self, edge: usize, reversed: bool) {
        self.reversed[edge] = reversed;
    }

    /// Position of this orientation in the enumeration of `Ori(G)`.
    pub fn index(&self) -> BigUint {
        let mut index = BigUint::zero();
        for (i, &bit) in self.reversed.iter().enumerate() {
            if bit {
                index.set_bit(i as u64, true);
            }
        }
        index
    }

    pub fn reversed(&self) -> Self {
        Self {
            reversed: self.reversed.iter().map(|b| !b).collect(),
        }
    }

    pub fn check_graph(&self, graph: &FiniteGraph) -> Result<()> {
        if self.reversed.len() != graph.edge_count() {
            return Err(Error::EdgeCountMismatch {
                expected: self.reversed.len(),
                found: graph.edge_count(),
            });
        }
        Ok(())
    }

    /// `(tail, head)` of canonical edge `edge`.
    pub fn arc(&self, graph: &FiniteGraph, edge: usize) -> (usize, usize) {
        let (u, v) = graph.edge(edge);
        if self.reversed[edge] {
            (v, u)
        } else {
            (u, v)
        }
    }

    /// Direction of the pair `(from, to)`, or `None` if it is not an edge.
    pub fn direction(&self, graph: &FiniteGraph, from: usize, to: usize) -> Option<Direction> {
        let e = graph.edge_index(from, to)?;
        let toward_high = !self.reversed[e];
        Some(if toward_high == (to > from) {
            Direction::Forward
        } else {
            Direction::Reverse
        })
    }
}

/// The orientation of `graph` whose index in `Ori(G)` is `index`.
pub fn orientation_by_index(graph: &FiniteGraph, index: &BigUint) -> Result<Orientation> {
    let m = graph.edge_count();
    if index.bits() > m as u64 {
        return Err(Error::OrientationOutOfRange {
            index: index.clone(),
            edges: m,
        });
    }
    Ok(Orientation {
        reversed: (0..m).map(|i| index.bit(i as u64)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::make_complete_bipartite;
    use std::collections::HashSet;

    #[test]
    fn index_zero_is_low_to_high() {
        let g = make_complete_bipartite(2).unwrap();
        let o = orientation_by_index(&g, &BigUint::zero()).unwrap();
        for e in 0..g.edge_count() {
            let (tail, head) = o.arc(&g, e);
            assert!(tail < head);
            assert_eq!(g.side(tail), Some(crate::graph::Side::A));
        }
    }

    #[test]
    fn single_edge_index_one_is_reversed() {
        let g = make_complete_bipartite(1).unwrap();
        let o = orientation_by_index(&g, &BigUint::from(1u32)).unwrap();
        assert_eq!(o.arc(&g, 0), (1, 0));
        assert_eq!(o.direction(&g, 1, 0), Some(Direction::Forward));
        assert_eq!(o.direction(&g, 0, 1), Some(Direction::Reverse));
        assert!(orientation_by_index(&g, &BigUint::from(2u32)).is_err());
    }

    #[test]
    fn k22_has_sixteen_distinct_orientations() {
        let g = make_complete_bipartite(2).unwrap();
        let all: HashSet<_> = (0u32..16)
            .map(|m| orientation_by_index(&g, &BigUint::from(m)).unwrap())
            .collect();
        assert_eq!(all.len(), 16);
        assert!(orientation_by_index(&g, &BigUint::from(16u32)).is_err());
    }

    #[test]
    fn index_round_trips_and_is_a_bijection() {
        // 20 edges: a 5x4 grid of K_{5,4}.
        let edges = (0..5).flat_map(|a| (5..9).map(move |b| (a, b)));
        let g = FiniteGraph::from_edges(9, edges, None).unwrap();
        assert_eq!(g.edge_count(), 20);
        let mut seen = vec![false; 1 << 20];
        for m in 0u32..(1 << 20) {
            let o = orientation_by_index(&g, &BigUint::from(m)).unwrap();
            let back = o.index();
            let slot = u32::try_from(&back).unwrap() as usize;
            assert_eq!(slot, m as usize);
            assert!(!seen[slot]);
            seen[slot] = true;
        }
    }
}
