use std::collections::VecDeque;

use num_bigint::BigInt;

use super::{Circulation, FiniteGraph, Side};
use crate::error::{Error, Result};
use crate::Rational;

/// A set of pairwise disjoint edges, as sorted canonical edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<usize>,
}

impl Matching {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self { edges }
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Per-vertex partner, failing if two edges share an endpoint.
    pub fn partners(&self, graph: &FiniteGraph) -> Result<Vec<Option<usize>>> {
        let mut mate = vec![None; graph.vertex_count()];
        for &e in &self.edges {
            if e >= graph.edge_count() {
                return Err(Error::NotAnEdge(format!("edge index {e}")));
            }
            let (u, v) = graph.edge(e);
            if mate[u].is_some() || mate[v].is_some() {
                return Err(Error::NotPerfectMatching(format!(
                    "edges share an endpoint at edge ({u}, {v})"
                )));
            }
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
        Ok(mate)
    }
}

const UNMATCHED: usize = usize::MAX;

/// Maximum matching of a bipartite graph (Hopcroft–Karp).
pub fn max_matching(graph: &FiniteGraph) -> Result<Matching> {
    let sides = graph.bipartition().ok_or(Error::MissingBipartition)?;
    let left: Vec<usize> = (0..graph.vertex_count())
        .filter(|&v| sides[v] == Side::A)
        .collect();
    let n = graph.vertex_count();
    let mut mate = vec![UNMATCHED; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();

    loop {
        // Layer the free left vertices and alternate along unmatched/matched edges.
        queue.clear();
        for &a in &left {
            if mate[a] == UNMATCHED {
                dist[a] = 0;
                queue.push_back(a);
            } else {
                dist[a] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(a) = queue.pop_front() {
            for &(b, _) in graph.neighbors(a) {
                let next = mate[b];
                if next == UNMATCHED {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[a] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }

        // Vertex-disjoint shortest augmenting paths, iterative DFS.
        let mut cursor = vec![0usize; n];
        for &root in &left {
            if mate[root] != UNMATCHED {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&a) = stack.last() {
                let nbrs = graph.neighbors(a);
                if cursor[a] == nbrs.len() {
                    dist[a] = usize::MAX;
                    stack.pop();
                    continue;
                }
                let (b, _) = nbrs[cursor[a]];
                cursor[a] += 1;
                let next = mate[b];
                if next == UNMATCHED {
                    // Flip the path recorded on the stack.
                    let mut target = b;
                    for &x in stack.iter().rev() {
                        let previous = mate[x];
                        mate[x] = target;
                        mate[target] = x;
                        target = previous;
                    }
                    break;
                }
                if dist[next] != usize::MAX && dist[next] == dist[a] + 1 {
                    stack.push(next);
                }
            }
        }
    }

    let edges = left
        .iter()
        .filter(|&&a| mate[a] != UNMATCHED)
        .map(|&a| graph.edge_index(a, mate[a]).expect("matched pair is an edge"))
        .collect();
    Ok(Matching::new(edges))
}

/// The circulation `φ(a,b) = d−1` on matched A→B pairs and `−1` on unmatched
/// A→B pairs of a `d`-regular bipartite graph with perfect matching `m`.
pub fn matching_to_circulation(graph: &FiniteGraph, m: &Matching) -> Result<Circulation> {
    let sides = graph.bipartition().ok_or(Error::MissingBipartition)?;
    let d = graph.regular_degree().ok_or(Error::NotRegular)?;
    let mate = m.partners(graph)?;
    if let Some(v) = mate.iter().position(Option::is_none) {
        return Err(Error::NotPerfectMatching(format!("vertex {v} is unmatched")));
    }
    let mut in_matching = vec![false; graph.edge_count()];
    for &e in m.edges() {
        in_matching[e] = true;
    }
    let matched = Rational::from_integer(BigInt::from(d as i64 - 1));
    let unmatched = Rational::from_integer(BigInt::from(-1));
    let values = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, _))| {
            let a_to_b = if in_matching[e] { &matched } else { &unmatched };
            // Stored direction is low -> high; flip when the low end is on side B.
            if sides[u] == Side::A {
                a_to_b.clone()
            } else {
                -a_to_b
            }
        })
        .collect();
    Ok(Circulation::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_circulation, make_complete_bipartite};

    /// Matching size by brute force over edge subsets.
    fn brute_force_matching_size(g: &FiniteGraph) -> usize {
        let m = g.edge_count();
        assert!(m <= 16);
        (0u32..1 << m)
            .filter(|mask| {
                let mut used = vec![false; g.vertex_count()];
                (0..m).filter(|e| mask >> e & 1 == 1).all(|e| {
                    let (u, v) = g.edge(e);
                    let ok = !used[u] && !used[v];
                    used[u] = true;
                    used[v] = true;
                    ok
                })
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn complete_bipartite_matchings_are_perfect() {
        for d in 1..=4 {
            let g = make_complete_bipartite(d).unwrap();
            assert_eq!(max_matching(&g).unwrap().len(), d);
        }
    }

    #[test]
    fn matches_brute_force_on_unbalanced_graphs() {
        let sides = |n: usize, a: usize| {
            (0..n)
                .map(|v| if v < a { Side::A } else { Side::B })
                .collect::<Vec<_>>()
        };
        let cases = [
            (6, 3, vec![(0, 3), (1, 3), (2, 3), (2, 4), (2, 5)]),
            (7, 3, vec![(0, 3), (0, 4), (1, 4), (2, 4), (2, 5), (2, 6), (1, 6)]),
            (5, 2, vec![(0, 2), (1, 2)]),
        ];
        for (n, a, edges) in cases {
            let g = FiniteGraph::from_edges(n, edges, Some(sides(n, a))).unwrap();
            let m = max_matching(&g).unwrap();
            m.partners(&g).unwrap();
            assert_eq!(m.len(), brute_force_matching_size(&g));
        }
    }

    #[test]
    fn requires_bipartition() {
        let g = FiniteGraph::from_edges(2, [(0, 1)], None).unwrap();
        assert!(matches!(max_matching(&g), Err(Error::MissingBipartition)));
    }

    #[test]
    fn phi_values_for_k22_and_k33() {
        for d in [2usize, 3] {
            let g = make_complete_bipartite(d).unwrap();
            let m = max_matching(&g).unwrap();
            let phi = matching_to_circulation(&g, &m).unwrap();
            assert!(is_circulation(&g, &phi).unwrap());
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                let expected = if m.edges().contains(&e) { d as i64 - 1 } else { -1 };
                assert_eq!(
                    phi.value_on(&g, a, b).unwrap(),
                    Rational::from_integer(BigInt::from(expected))
                );
            }
        }
    }

    #[test]
    fn single_edge_phi_is_zero() {
        let g = make_complete_bipartite(1).unwrap();
        let phi = matching_to_circulation(&g, &max_matching(&g).unwrap()).unwrap();
        assert!(phi.is_zero());
    }

    #[test]
    fn rejects_imperfect_matching() {
        let g = make_complete_bipartite(2).unwrap();
        let half = Matching::new(vec![0]);
        assert!(matches!(
            matching_to_circulation(&g, &half),
            Err(Error::NotPerfectMatching(_))
        ));
        let path = FiniteGraph::from_edges(
            3,
            [(0, 1), (1, 2)],
            Some(vec![Side::A, Side::B, Side::A]),
        )
        .unwrap();
        assert!(matches!(
            matching_to_circulation(&path, &Matching::new(vec![0])),
            Err(Error::NotRegular)
        ));
    }
}
