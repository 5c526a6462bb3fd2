use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FiniteGraph;
use crate::error::{Error, Result};
use crate::Rational;

/// Denominator used for the random cycle coefficients in `[-1, 1]`.
const COEFFICIENT_SCALE: i64 = 1000;

/// An antisymmetric function on ordered adjacent pairs, stored as one value
/// per canonical edge in the low-to-high direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circulation {
    values: Vec<Rational>,
}

impl Circulation {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn zero(edge_count: usize) -> Self {
        Self {
            values: vec![Rational::zero(); edge_count],
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn edge_count(&self) -> usize {
        self.values.len()
    }

    /// Value on the canonical edge in its low-to-high direction.
    pub fn value(&self, edge: usize) -> &Rational {
        &self.values[edge]
    }

    /// `f(from, to)` for an edge of `graph`.
    pub fn value_on(&self, graph: &FiniteGraph, from: usize, to: usize) -> Option<Rational> {
        let e = graph.edge_index(from, to)?;
        let v = &self.values[e];
        Some(if from < to { v.clone() } else { -v })
    }

    /// Sum of absolute edge values.
    pub fn l1_norm(&self) -> Rational {
        self.values
            .iter()
            .fold(Rational::zero(), |acc, v| acc + v.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    fn check_graph(&self, graph: &FiniteGraph) -> Result<()> {
        if self.values.len() != graph.edge_count() {
            return Err(Error::EdgeCountMismatch {
                expected: self.values.len(),
                found: graph.edge_count(),
            });
        }
        Ok(())
    }

    /// First vertex whose net outflow is nonzero.
    fn first_unbalanced_vertex(&self, graph: &FiniteGraph) -> Option<usize> {
        let mut net = vec![Rational::zero(); graph.vertex_count()];
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            let value = &self.values[e];
            if value.is_zero() {
                continue;
            }
            net[u] += value;
            net[v] -= value;
        }
        net.iter().position(|x| !x.is_zero())
    }
}

/// Integer vertex labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    values: Vec<i64>,
}

impl Potential {
    pub fn new(values: Vec<i64>) -> Self {
        Self { values }
    }

    pub fn constant(vertex_count: usize, value: i64) -> Self {
        Self {
            values: vec![value; vertex_count],
        }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, v: usize) -> i64 {
        self.values[v]
    }

    pub fn check_graph(&self, graph: &FiniteGraph) -> Result<()> {
        if self.values.len() != graph.vertex_count() {
            return Err(Error::VertexCountMismatch {
                expected: self.values.len(),
                found: graph.vertex_count(),
            });
        }
        Ok(())
    }

    /// Fails unless `|g(x) - g(y)| <= 1` across every edge.
    pub fn check_unit_steps(&self, graph: &FiniteGraph) -> Result<()> {
        self.check_graph(graph)?;
        for &(u, v) in graph.edges() {
            let step = self.values[v] - self.values[u];
            if step.abs() > 1 {
                return Err(Error::PotentialStepOutOfRange { u, v, step });
            }
        }
        Ok(())
    }
}

/// Exact zero-divergence test.
pub fn is_circulation(graph: &FiniteGraph, f: &Circulation) -> Result<bool> {
    f.check_graph(graph)?;
    Ok(f.first_unbalanced_vertex(graph).is_none())
}

/// A seeded linear combination of fundamental-cycle indicators.
///
/// Fundamental cycles come from a breadth-first spanning forest; each of
/// the `cycle_count` terms picks a non-tree edge uniformly and a coefficient
/// `k / 1000` with `k` uniform in `[-1000, 1000]`. Acyclic graphs yield the
/// zero circulation.
pub fn random_circulation(graph: &FiniteGraph, seed: u64, cycle_count: usize) -> Circulation {
    let n = graph.vertex_count();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree_edge = vec![false; graph.edge_count()];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &(w, e) in graph.neighbors(u) {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent[w] = Some((u, e));
                    tree_edge[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let chords: Vec<usize> = (0..graph.edge_count()).filter(|&e| !tree_edge[e]).collect();

    let mut values = vec![Rational::zero(); graph.edge_count()];
    if chords.is_empty() {
        return Circulation::new(values);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let push = |values: &mut Vec<Rational>, from: usize, to: usize, e: usize, c: &Rational| {
        if from < to {
            values[e] += c;
        } else {
            values[e] -= c;
        }
    };
    for _ in 0..cycle_count {
        let chord = chords[rng.gen_range(0..chords.len())];
        let k = rng.gen_range(-COEFFICIENT_SCALE..=COEFFICIENT_SCALE);
        let c = Rational::new(BigInt::from(k), BigInt::from(COEFFICIENT_SCALE));
        // Cycle: u -> v along the chord, then v back to u through the tree.
        let (u, v) = graph.edge(chord);
        push(&mut values, u, v, chord, &c);
        let (mut a, mut b) = (v, u);
        // Walk a up toward the common ancestor going forward, and b up
        // toward it going backward.
        while a != b {
            if depth[a] >= depth[b] {
                let (p, e) = parent[a].expect("non-root vertex has a parent");
                push(&mut values, a, p, e, &c);
                a = p;
            } else {
                let (p, e) = parent[b].expect("non-root vertex has a parent");
                push(&mut values, p, b, e, &c);
                b = p;
            }
        }
    }
    Circulation::new(values)
}

/// `Σ f(x,y)·(g(x) − g(y))` over ordered adjacent pairs, each weighted by
/// one half. Zero for every circulation.
pub fn potential_pairing(graph: &FiniteGraph, f: &Circulation, g: &Potential) -> Result<Rational> {
    f.check_graph(graph)?;
    g.check_graph(graph)?;
    if let Some(vertex) = f.first_unbalanced_vertex(graph) {
        return Err(Error::NotCirculation { vertex });
    }
    let mut total = Rational::zero();
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        let value = f.value(e);
        if value.is_zero() {
            continue;
        }
        let forward = value * BigInt::from(g.value(u) - g.value(v));
        let backward = -value * BigInt::from(g.value(v) - g.value(u));
        total += forward + backward;
    }
    Ok(total / BigInt::from(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::make_complete_bipartite;

    fn int(v: i64) -> Rational {
        Rational::from_integer(BigInt::from(v))
    }

    /// Unit flow around the 4-cycle 0 -> 2 -> 1 -> 3 -> 0 of K_{2,2}.
    /// Edges of K_{2,2}: (0,2), (0,3), (1,2), (1,3).
    fn k22_cycle() -> Circulation {
        Circulation::new(vec![int(1), int(-1), int(-1), int(1)])
    }

    #[test]
    fn zero_and_cycle_are_circulations() {
        let g = make_complete_bipartite(2).unwrap();
        assert!(is_circulation(&g, &Circulation::zero(4)).unwrap());
        assert!(is_circulation(&g, &k22_cycle()).unwrap());
        let single = Circulation::new(vec![int(1), int(0), int(0), int(0)]);
        assert!(!is_circulation(&g, &single).unwrap());
        assert!(is_circulation(&g, &Circulation::zero(3)).is_err());
    }

    #[test]
    fn value_on_is_antisymmetric() {
        let g = make_complete_bipartite(2).unwrap();
        let f = k22_cycle();
        assert_eq!(f.value_on(&g, 0, 3), Some(int(-1)));
        assert_eq!(f.value_on(&g, 3, 0), Some(int(1)));
        assert_eq!(f.value_on(&g, 0, 1), None);
    }

    #[test]
    fn tree_gives_zero_circulation() {
        let path = FiniteGraph::from_edges(4, [(0, 1), (1, 2), (1, 3)], None).unwrap();
        assert!(random_circulation(&path, 3, 5).is_zero());
    }

    #[test]
    fn random_circulation_is_deterministic() {
        let g = make_complete_bipartite(3).unwrap();
        assert_eq!(random_circulation(&g, 11, 4), random_circulation(&g, 11, 4));
        assert_ne!(random_circulation(&g, 11, 4), random_circulation(&g, 12, 4));
    }

    #[test]
    fn pairing_with_constant_potential_is_zero() {
        let g = make_complete_bipartite(3).unwrap();
        let f = random_circulation(&g, 5, 3);
        let pairing = potential_pairing(&g, &f, &Potential::constant(6, 7)).unwrap();
        assert!(pairing.is_zero());
    }

    #[test]
    fn pairing_on_marked_vertex_hand_sum() {
        // g = indicator of vertex 0. Ordered pairs touching 0:
        // (0,2): f=1, g(0)-g(2)=1 -> 1;  (2,0): f=-1, g(2)-g(0)=-1 -> 1
        // (0,3): f=-1, 1 -> -1;          (3,0): f=1, -1 -> -1
        // The other four ordered pairs have g(x)-g(y)=0. Sum 0.
        let g = make_complete_bipartite(2).unwrap();
        let marked = Potential::new(vec![1, 0, 0, 0]);
        assert!(potential_pairing(&g, &k22_cycle(), &marked).unwrap().is_zero());
    }

    #[test]
    fn pairing_rejects_non_circulations() {
        let g = make_complete_bipartite(2).unwrap();
        let single = Circulation::new(vec![int(1), int(0), int(0), int(0)]);
        let err = potential_pairing(&g, &single, &Potential::constant(4, 0)).unwrap_err();
        assert!(matches!(err, Error::NotCirculation { vertex: 0 }));
    }

    #[test]
    fn unit_step_check() {
        let g = make_complete_bipartite(2).unwrap();
        assert!(Potential::new(vec![0, 0, 1, 1]).check_unit_steps(&g).is_ok());
        assert!(matches!(
            Potential::new(vec![0, 0, 2, 1]).check_unit_steps(&g),
            Err(Error::PotentialStepOutOfRange { step: 2, .. })
        ));
    }
}
