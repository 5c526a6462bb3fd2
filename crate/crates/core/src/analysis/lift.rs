use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::expansion::Materialized;
use crate::graph::Orientation;
use crate::Rational;

/// Direction given to edges at padding vertices, where a lifted orientation
/// has no say.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum V0Rule {
    /// From the slot (lower id) to the pad.
    LowToHigh,
    /// Chosen to admit the largest aligned circulation.
    Adversarial,
}

/// `true` for edges with both endpoints in `V1`.
pub fn v1_edge_mask(m: &Materialized) -> Vec<bool> {
    m.graph()
        .edges()
        .iter()
        .map(|&(x, y)| !m.is_v0(x) && !m.is_v0(y))
        .collect()
}

/// Slot–pad pairs (0-based) removed from the block `K_{a,b}` to leave its
/// largest even-degree subgraph.
pub fn removed_block_edges(a: usize, b: usize) -> Vec<(usize, usize)> {
    if a == 0 || b == 0 {
        return Vec::new();
    }
    match (a % 2, b % 2) {
        (0, 0) => Vec::new(),
        (0, _) => (0..a).map(|i| (i, 0)).collect(),
        (_, 0) => (0..b).map(|j| (0, j)).collect(),
        _ => (0..a.max(b)).map(|t| (t.min(a - 1), t.min(b - 1))).collect(),
    }
}

/// Edges of the largest even-degree subgraph of `K_{a,b}`.
pub fn block_optimum(a: usize, b: usize) -> usize {
    a * b - removed_block_edges(a, b).len()
}

/// `Σ` of [`block_optimum`] over the padding blocks of `m`: the aligned
/// circulation optimum of any lift with [`V0Rule::Adversarial`] padding.
pub fn adversarial_optimum(m: &Materialized) -> usize {
    let d = m.params().degree();
    (0..m.tuple_count())
        .map(|t| block_optimum(d, m.pad_ids(t).len()))
        .sum()
}

/// Orients every padding block along closed trails of its largest even
/// subgraph; removed edges keep the low-to-high direction.
fn orient_blocks(m: &Materialized, bits: &mut [bool]) -> Result<()> {
    let g = m.graph();
    for t in 0..m.tuple_count() {
        let pads: Vec<usize> = m.pad_ids(t).collect();
        if pads.is_empty() {
            continue;
        }
        let slots = m.slot_ids(t);
        let (a, b) = (slots.len(), pads.len());
        let removed = removed_block_edges(a, b);
        // Local vertices: slots 0..a, pads a..a+b.
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); a + b];
        let mut kept: Vec<(usize, usize)> = Vec::new();
        for i in 0..a {
            for j in 0..b {
                if !removed.contains(&(i, j)) {
                    let id = kept.len();
                    kept.push((i, a + j));
                    adj[i].push((a + j, id));
                    adj[a + j].push((i, id));
                }
            }
        }
        let mut used = vec![false; kept.len()];
        let mut cursor = vec![0usize; a + b];
        for start in 0..a + b {
            loop {
                let mut v = start;
                let mut moved = false;
                loop {
                    while cursor[v] < adj[v].len() && used[adj[v][cursor[v]].1] {
                        cursor[v] += 1;
                    }
                    let Some(&(w, id)) = adj[v].get(cursor[v]) else {
                        break;
                    };
                    used[id] = true;
                    moved = true;
                    let local = |x: usize| if x < a { slots[x] } else { pads[x - a] };
                    let (from, to) = (local(v), local(w));
                    let Some(e) = g.edge_index(from, to) else {
                        return Err(Error::NotAnEdge(format!("({from}, {to}) in a padding block")));
                    };
                    bits[e] = from > to;
                    v = w;
                }
                if !moved {
                    break;
                }
                debug_assert_eq!(v, start, "even degrees close every trail");
            }
        }
    }
    Ok(())
}

/// The lift of a base orientation `o` to `m`: every `V1` edge copies the
/// direction of its projected base edge.
pub fn lifted_orientation(m: &Materialized, o: &Orientation, rule: V0Rule) -> Result<Orientation> {
    let base = m.params().base();
    o.check_graph(base)?;
    let g = m.graph();
    let mut bits = vec![false; g.edge_count()];
    for (e, &(x, y)) in g.edges().iter().enumerate() {
        if m.is_v0(x) || m.is_v0(y) {
            continue;
        }
        let (px, py) = (m.project(x), m.project(y));
        let Some(be) = base.edge_index(px, py) else {
            return Err(Error::NotAnEdge(format!(
                "lifted edge ({x}, {y}) has no base edge ({px}, {py})"
            )));
        };
        let (tail, _) = o.arc(base, be);
        bits[e] = tail == py;
    }
    if rule == V0Rule::Adversarial {
        orient_blocks(m, &mut bits)?;
    }
    Ok(Orientation::from_bits(bits))
}

/// The best single orientation of the base graph for an orientation of the
/// expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFit {
    pub orientation: Orientation,
    /// Lifted edges whose direction disagrees with the lift of `orientation`.
    pub disagreeing: usize,
    /// Edges with both endpoints in `V1`.
    pub lifted_edges: usize,
    /// `disagreeing / lifted_edges` (zero when there are no lifted edges).
    pub disagreement: Rational,
}

/// Fraction of lifted edges where `omega` disagrees with the lift of `o`.
pub fn disagreement(m: &Materialized, omega: &Orientation, o: &Orientation) -> Result<(usize, usize)> {
    let lift = lifted_orientation(m, o, V0Rule::LowToHigh)?;
    omega.check_graph(m.graph())?;
    let mask = v1_edge_mask(m);
    let lifted = mask.iter().filter(|&&b| b).count();
    let differ = (0..mask.len())
        .filter(|&e| mask[e] && lift.is_reversed(e) != omega.is_reversed(e))
        .count();
    Ok((differ, lifted))
}

/// Per base edge, the majority direction of `omega` over the edge's lifts
/// (ties go low to high). Base edges are independent, so this minimizes the
/// disagreement over all orientations of the base graph.
pub fn best_level_orientation(m: &Materialized, omega: &Orientation) -> Result<LevelFit> {
    let g = m.graph();
    omega.check_graph(g)?;
    let base = m.params().base();
    let mut forward = vec![0usize; base.edge_count()];
    let mut backward = vec![0usize; base.edge_count()];
    for (e, &(x, y)) in g.edges().iter().enumerate() {
        if m.is_v0(x) || m.is_v0(y) {
            continue;
        }
        let (px, py) = (m.project(x), m.project(y));
        let Some(be) = base.edge_index(px, py) else {
            return Err(Error::NotAnEdge(format!("lifted edge ({x}, {y})")));
        };
        let (tail, _) = omega.arc(g, e);
        if m.project(tail) == base.edge(be).0 {
            forward[be] += 1;
        } else {
            backward[be] += 1;
        }
    }
    let bits: Vec<bool> = forward.iter().zip(&backward).map(|(f, b)| b > f).collect();
    let disagreeing: usize = forward.iter().zip(&backward).map(|(f, b)| *f.min(b)).sum();
    let lifted_edges: usize = forward.iter().sum::<usize>() + backward.iter().sum::<usize>();
    Ok(LevelFit {
        orientation: Orientation::from_bits(bits),
        disagreeing,
        lifted_edges,
        disagreement: ratio(disagreeing, lifted_edges),
    })
}

pub(crate) fn ratio(p: usize, q: usize) -> Rational {
    if q == 0 {
        return Rational::from_integer(BigInt::from(0));
    }
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::flow::{is_acyclic, max_aligned_circulation};
    use crate::expansion::tests::toy;
    use crate::expansion::{ExpansionParams, SubsetSpec};
    use crate::graph::{make_complete_bipartite, orientation_by_index};
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy_m() -> Materialized {
        Materialized::build(&toy(), 1 << 20).unwrap()
    }

    #[test]
    fn removal_leaves_even_degrees() {
        for a in 1..6 {
            for b in 1..6 {
                let removed = removed_block_edges(a, b);
                let mut deg_slot = vec![b; a];
                let mut deg_pad = vec![a; b];
                for &(i, j) in &removed {
                    deg_slot[i] -= 1;
                    deg_pad[j] -= 1;
                }
                assert!(deg_slot.iter().chain(&deg_pad).all(|d| d % 2 == 0), "{a}x{b}");
                let lower = match (a % 2, b % 2) {
                    (0, 0) => 0,
                    (0, _) => a,
                    (_, 0) => b,
                    _ => a.max(b),
                };
                assert_eq!(removed.len(), lower, "{a}x{b}");
            }
        }
    }

    #[test]
    fn lift_of_subset_orientation_agrees_with_the_potential() {
        let m = toy_m();
        let o = m.params().orientation(0).clone();
        let lift = lifted_orientation(&m, &o, V0Rule::LowToHigh).unwrap();
        let mask = v1_edge_mask(&m);
        for (e, &(x, y)) in m.graph().edges().iter().enumerate() {
            if mask[e] {
                let (t, h) = lift.arc(m.graph(), e);
                assert_eq!(m.potential(0, h), m.potential(0, t) + 1, "edge ({x}, {y})");
            }
        }
        assert!(is_acyclic(m.graph(), &lift, Some(&mask)).unwrap());
    }

    #[test]
    fn adversarial_padding_matches_block_formula_and_solver() {
        for d in 1..=3 {
            let g = make_complete_bipartite(d).unwrap();
            let p = ExpansionParams::new(g, 2, SubsetSpec::Indices(vec![BigUint::from(1u32)]))
                .unwrap();
            let m = Materialized::build(&p, 1 << 20).unwrap();
            let lift = lifted_orientation(&m, p.orientation(0), V0Rule::Adversarial).unwrap();
            let best = max_aligned_circulation(m.graph(), &lift, None).unwrap();
            assert_eq!(best.value, ratio(adversarial_optimum(&m), 1), "d = {d}");
            assert!(adversarial_optimum(&m) <= d * m.v0_count());
        }
        let m = toy_m();
        let lift = lifted_orientation(&m, m.params().orientation(0), V0Rule::Adversarial).unwrap();
        let best = max_aligned_circulation(m.graph(), &lift, None).unwrap();
        assert_eq!(best.value, ratio(adversarial_optimum(&m), 1));
        // Every V0 tuple of the toy has two pads: K_{2,2} blocks carry 4 each.
        assert_eq!(adversarial_optimum(&m), 16);
    }

    #[test]
    fn fit_recovers_a_lift() {
        let m = toy_m();
        let base = m.params().base();
        for i in 0u32..16 {
            let o = orientation_by_index(base, &BigUint::from(i)).unwrap();
            let lift = lifted_orientation(&m, &o, V0Rule::LowToHigh).unwrap();
            let fit = best_level_orientation(&m, &lift).unwrap();
            assert_eq!(fit.orientation, o);
            assert_eq!(fit.disagreeing, 0);
        }
    }

    #[test]
    fn single_flip_costs_one_edge() {
        let m = toy_m();
        let o = m.params().orientation(0).clone();
        let mut lift = lifted_orientation(&m, &o, V0Rule::LowToHigh).unwrap();
        let e = v1_edge_mask(&m).iter().position(|&b| b).unwrap();
        lift.set_reversed(e, !lift.is_reversed(e));
        let fit = best_level_orientation(&m, &lift).unwrap();
        assert_eq!(fit.orientation, o);
        assert_eq!(fit.disagreement, ratio(1, fit.lifted_edges));
        assert_eq!(fit.lifted_edges, 16);
    }

    #[test]
    fn random_orientations_match_brute_force() {
        let m = toy_m();
        let base = m.params().base();
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bits = (0..m.graph().edge_count()).map(|_| rng.gen_bool(0.5)).collect();
            let omega = Orientation::from_bits(bits);
            let fit = best_level_orientation(&m, &omega).unwrap();
            let brute = (0u32..16)
                .map(|i| {
                    let o = orientation_by_index(base, &BigUint::from(i)).unwrap();
                    disagreement(&m, &omega, &o).unwrap().0
                })
                .min()
                .unwrap();
            assert_eq!(fit.disagreeing, brute);
            assert!(fit.disagreement <= ratio(1, 2));
        }
    }
}
