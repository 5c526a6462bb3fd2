use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::{ExpandedVertex, ExpansionCounts, ExpansionParams};
use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Side};

/// An explicitly enumerated expansion.
///
/// Vertex ids follow the lexicographic order of codes, `V1` before `V0`.
/// With `P = N^K` and tuple index `t = base·P + rank(profile)`, where the
/// rank reads the profile as base-`N` digits with the first coordinate most
/// significant, the `V1` vertex `(slot, base, profile)` has id
/// `(slot−1)·|V(G)|·P + t`, and the pads of tuple `t` follow all `V1` ids in
/// tuple order.
#[derive(Debug, Clone)]
pub struct Materialized {
    params: ExpansionParams,
    graph: FiniteGraph,
    counts: ExpansionCounts,
    profile_count: u64,
    place: Vec<u64>,
    tuple_count: usize,
    v1_count: usize,
    pad_offsets: Vec<usize>,
    v0_tuple: Vec<usize>,
}

impl Materialized {
    /// Enumerates `Expand(params)` if its vertex count is at most `limit`.
    pub fn build(params: &ExpansionParams, limit: u64) -> Result<Self> {
        let counts = params.counts();
        if counts.total_count > BigUint::from(limit) {
            return Err(Error::MaterializationRefused {
                total: counts.total_count.to_string(),
                limit,
            });
        }
        let base = params.base();
        let d = params.degree();
        let n = params.n();
        let k = params.k();
        let profile_count = counts
            .v1_count
            .to_u64()
            .map(|v1| v1 / (d * base.vertex_count()) as u64)
            .expect("bounded by limit");
        let mut place = vec![1u64; k];
        for s in (0..k.saturating_sub(1)).rev() {
            place[s] = place[s + 1] * n;
        }
        let tuple_count = base.vertex_count() * profile_count as usize;
        let v1_count = d * tuple_count;

        // lift[t * d + j]: profile rank reached along the j-th base neighbor
        // of the tuple's base, or u64::MAX when some coordinate leaves 1..=N.
        let mut lift = vec![u64::MAX; tuple_count * d];
        let mut pad_offsets = Vec::with_capacity(tuple_count + 1);
        pad_offsets.push(0usize);
        let mut digits = vec![0u64; k];
        for v in 0..base.vertex_count() {
            let nbrs = base.neighbors(v);
            for rank in 0..profile_count {
                let t = v * profile_count as usize + rank as usize;
                let mut r = rank;
                for s in (0..k).rev() {
                    digits[s] = r % n;
                    r /= n;
                }
                let mut lifted = 0usize;
                for (j, &(b, e)) in nbrs.iter().enumerate() {
                    let mut target = rank;
                    let ok = (0..k).all(|s| {
                        if params.steps_up(e, s, v, b) {
                            target = target.wrapping_add(place[s]);
                            digits[s] + 1 < n
                        } else {
                            target = target.wrapping_sub(place[s]);
                            digits[s] > 0
                        }
                    });
                    if ok {
                        lift[t * d + j] = target;
                        lifted += 1;
                    }
                }
                pad_offsets.push(pad_offsets[t] + d - lifted);
            }
        }
        let v0_count = pad_offsets[tuple_count];
        let mut v0_tuple = Vec::with_capacity(v0_count);
        for t in 0..tuple_count {
            v0_tuple.extend(std::iter::repeat_n(t, pad_offsets[t + 1] - pad_offsets[t]));
        }

        let mut edges = Vec::with_capacity(d * (v1_count + v0_count) / 2);
        for slot in 0..d {
            for v in 0..base.vertex_count() {
                let nbrs = base.neighbors(v);
                for rank in 0..profile_count as usize {
                    let t = v * profile_count as usize + rank;
                    let x = slot * tuple_count + t;
                    for (j, &(b, _)) in nbrs.iter().enumerate() {
                        let target = lift[t * d + j];
                        if target != u64::MAX {
                            let y = slot * tuple_count + b * profile_count as usize + target as usize;
                            if x < y {
                                edges.push((x, y));
                            }
                        }
                    }
                    for z in pad_offsets[t]..pad_offsets[t + 1] {
                        edges.push((x, v1_count + z));
                    }
                }
            }
        }

        let total = v1_count + v0_count;
        let sides = base.bipartition().map(|base_sides| {
            let mut sides = Vec::with_capacity(total);
            for id in 0..v1_count {
                sides.push(base_sides[(id % tuple_count) / profile_count as usize]);
            }
            for &t in &v0_tuple {
                sides.push(Side::opposite(base_sides[t / profile_count as usize]));
            }
            sides
        });
        let graph = FiniteGraph::from_edges(total, edges, sides)?;

        Ok(Self {
            params: params.clone(),
            graph,
            counts,
            profile_count,
            place,
            tuple_count,
            v1_count,
            pad_offsets,
            v0_tuple,
        })
    }

    pub fn params(&self) -> &ExpansionParams {
        &self.params
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn counts(&self) -> &ExpansionCounts {
        &self.counts
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn v1_count(&self) -> usize {
        self.v1_count
    }

    pub fn v0_count(&self) -> usize {
        self.v0_tuple.len()
    }

    pub fn is_v0(&self, id: usize) -> bool {
        id >= self.v1_count
    }

    /// Number of `(base, profile)` tuples, `|V(G)|·N^K`.
    pub fn tuple_count(&self) -> usize {
        self.tuple_count
    }

    /// The `d` slot vertices of tuple `t`, in slot order.
    pub fn slot_ids(&self, t: usize) -> Vec<usize> {
        (0..self.params.degree())
            .map(|j| j * self.tuple_count + t)
            .collect()
    }

    /// The padding vertices of tuple `t`, in pad order.
    pub fn pad_ids(&self, t: usize) -> std::ops::Range<usize> {
        self.v1_count + self.pad_offsets[t]..self.v1_count + self.pad_offsets[t + 1]
    }

    /// Tuple index `base·N^K + rank` of any vertex.
    pub fn tuple_of(&self, id: usize) -> usize {
        if id < self.v1_count {
            id % self.tuple_count
        } else {
            self.v0_tuple[id - self.v1_count]
        }
    }

    /// The projection `f(id)`.
    pub fn project(&self, id: usize) -> usize {
        self.tuple_of(id) / self.profile_count as usize
    }

    /// Profile coordinate at `position`, 1-based.
    pub fn potential(&self, position: usize, id: usize) -> u64 {
        let rank = (self.tuple_of(id) as u64) % self.profile_count;
        rank / self.place[position] % self.params.n() + 1
    }

    fn profile_of_rank(&self, rank: u64) -> Vec<u64> {
        self.place
            .iter()
            .map(|&w| rank / w % self.params.n() + 1)
            .collect()
    }

    pub fn code(&self, id: usize) -> ExpandedVertex {
        let t = self.tuple_of(id);
        let base = t / self.profile_count as usize;
        let profile = self.profile_of_rank(t as u64 % self.profile_count);
        if id < self.v1_count {
            ExpandedVertex::V1 {
                slot: id / self.tuple_count + 1,
                base,
                profile,
            }
        } else {
            ExpandedVertex::V0 {
                base,
                profile,
                pad: id - self.v1_count - self.pad_offsets[t] + 1,
            }
        }
    }

    /// Id of a coded vertex, or `None` if the code is not a vertex here.
    pub fn index_of(&self, x: &ExpandedVertex) -> Option<usize> {
        self.params.validate(x).ok()?;
        let rank: u64 = x
            .profile()
            .iter()
            .zip(&self.place)
            .map(|(&p, &w)| (p - 1) * w)
            .sum();
        let t = x.base() * self.profile_count as usize + rank as usize;
        Some(match x {
            ExpandedVertex::V1 { slot, .. } => (slot - 1) * self.tuple_count + t,
            ExpandedVertex::V0 { pad, .. } => self.v1_count + self.pad_offsets[t] + pad - 1,
        })
    }

    /// Ids of the vertices in the fiber `f⁻¹(a)`.
    pub fn fiber(&self, a: usize) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&x| self.project(x) == a).collect()
    }

    /// Copy with one edge deleted from the graph, leaving the codes intact.
    /// A negative control for the verification suite.
    pub fn without_edge(&self, edge: usize) -> Result<Self> {
        let mut copy = self.clone();
        copy.graph = self.graph.without_edge(edge)?;
        Ok(copy)
    }
}
