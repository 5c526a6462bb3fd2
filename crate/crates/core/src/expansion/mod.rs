//! The expansion `Expand(G, N)` of a finite `d`-regular graph.
//!
//! Vertices of the expansion are coded, never stored: a `V1` vertex is a
//! triple `(slot, base vertex, profile)` where the profile carries one
//! coordinate in `1..=N` per orientation of the chosen subset `S ⊆ Ori(G)`.
//! Two `V1` vertices are adjacent when they share a slot, their bases are
//! adjacent in `G`, and every profile coordinate moves by one step in the
//! direction its orientation gives the base edge. Every tuple
//! `(base, profile)` whose `d` slots have degree `k < d` gets `d − k` padding
//! vertices (`V0`), each joined to all `d` slots of the tuple, which restores
//! `d`-regularity.
//!
//! The neighbor oracle on [`ExpansionParams`] works at any size. The
//! [`Materialized`] form enumerates the graph when the exact vertex count,
//! from [`ExpansionCounts`], is under a caller-supplied limit.

mod codec;
mod counts;
mod materialize;
mod sample;
mod verify;

pub use counts::ExpansionCounts;
pub use materialize::Materialized;
pub use sample::{sample_uniform_in_fiber, sample_uniform_vertex, REJECTION_RETRIES_PER_DEGREE};
pub use verify::{verify_materialized, CheckOutcome, VerificationReport};

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::{orientation_by_index, Direction, FiniteGraph, Orientation};

/// Largest edge count for which the full orientation set is enumerated.
pub const MAX_EDGES_FOR_ALL_ORIENTATIONS: usize = 20;

/// Which orientations of the base graph index the profile coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetSpec {
    /// Every orientation, in ascending index order.
    All,
    /// An explicit ordered list of orientation indices.
    Indices(Vec<BigUint>),
}

/// A coded vertex of the expansion. Profile entries are 1-based.
///
/// The derived ordering is the materialization order: every `V1` vertex
/// before every `V0` vertex, each lexicographic in its fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExpandedVertex {
    V1 {
        slot: usize,
        base: usize,
        profile: Vec<u64>,
    },
    V0 {
        base: usize,
        profile: Vec<u64>,
        pad: usize,
    },
}

impl ExpandedVertex {
    pub fn base(&self) -> usize {
        match self {
            ExpandedVertex::V1 { base, .. } | ExpandedVertex::V0 { base, .. } => *base,
        }
    }

    pub fn profile(&self) -> &[u64] {
        match self {
            ExpandedVertex::V1 { profile, .. } | ExpandedVertex::V0 { profile, .. } => profile,
        }
    }

    pub fn is_v0(&self) -> bool {
        matches!(self, ExpandedVertex::V0 { .. })
    }
}

/// Parameters of one expansion step.
#[derive(Debug, Clone)]
pub struct ExpansionParams {
    base: Arc<FiniteGraph>,
    degree: usize,
    n: u64,
    subset: Vec<BigUint>,
    orientations: Vec<Orientation>,
    // toward_high[e][s]: orientation S[s] directs canonical edge e low -> high.
    toward_high: Vec<Vec<bool>>,
}

impl ExpansionParams {
    pub fn new(base: impl Into<Arc<FiniteGraph>>, n: u64, subset: SubsetSpec) -> Result<Self> {
        let base = base.into();
        let degree = base
            .regular_degree()
            .ok_or_else(|| Error::InvalidParams("base graph is not regular".into()))?;
        if degree == 0 {
            return Err(Error::ZeroDegree);
        }
        if n == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        let subset = match subset {
            SubsetSpec::All => {
                if base.edge_count() > MAX_EDGES_FOR_ALL_ORIENTATIONS {
                    return Err(Error::InvalidParams(format!(
                        "enumerating all 2^{} orientations is not supported (max 2^{})",
                        base.edge_count(),
                        MAX_EDGES_FOR_ALL_ORIENTATIONS
                    )));
                }
                (0u64..1 << base.edge_count()).map(BigUint::from).collect()
            }
            SubsetSpec::Indices(indices) => indices,
        };
        if subset.is_empty() {
            return Err(Error::InvalidParams("orientation subset is empty".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = subset.iter().find(|i| !seen.insert(*i)) {
            return Err(Error::InvalidParams(format!(
                "orientation index {dup} repeated in subset"
            )));
        }
        let orientations = subset
            .iter()
            .map(|i| orientation_by_index(&base, i))
            .collect::<Result<Vec<_>>>()?;
        let toward_high = (0..base.edge_count())
            .map(|e| orientations.iter().map(|o| !o.is_reversed(e)).collect())
            .collect();
        Ok(Self {
            base,
            degree,
            n,
            subset,
            orientations,
            toward_high,
        })
    }

    pub fn base(&self) -> &FiniteGraph {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<FiniteGraph> {
        Arc::clone(&self.base)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of orientation coordinates `K = |S|`.
    pub fn k(&self) -> usize {
        self.subset.len()
    }

    pub fn subset(&self) -> &[BigUint] {
        &self.subset
    }

    pub fn orientation(&self, position: usize) -> &Orientation {
        &self.orientations[position]
    }

    /// True when `S` is all of `Ori(G)` in ascending order.
    pub fn is_full_subset(&self) -> bool {
        let m = self.base.edge_count();
        m <= MAX_EDGES_FOR_ALL_ORIENTATIONS
            && self.subset.len() == 1usize << m
            && self
                .subset
                .iter()
                .enumerate()
                .all(|(i, idx)| *idx == BigUint::from(i))
    }

    pub fn counts(&self) -> ExpansionCounts {
        ExpansionCounts::new(
            self.degree,
            self.base.vertex_count(),
            &BigUint::from(self.n),
            self.k(),
        )
    }

    /// Does `S[position]` direct the base edge `(from, to)` toward `to`?
    /// `edge` must be the canonical index of `{from, to}`.
    fn steps_up(&self, edge: usize, position: usize, from: usize, to: usize) -> bool {
        self.toward_high[edge][position] == (to > from)
    }

    /// The profile of the lift of base edge `(from, to)` starting at
    /// `profile`, or `None` if some coordinate leaves `1..=N`.
    pub fn lift_profile(&self, from: usize, to: usize, edge: usize, profile: &[u64]) -> Option<Vec<u64>> {
        profile
            .iter()
            .enumerate()
            .map(|(s, &p)| {
                if self.steps_up(edge, s, from, to) {
                    (p < self.n).then_some(p + 1)
                } else {
                    (p > 1).then_some(p - 1)
                }
            })
            .collect()
    }

    /// Number of `V1` neighbors of any slot of the tuple `(base, profile)`.
    pub fn v1_degree(&self, base: usize, profile: &[u64]) -> usize {
        self.base
            .neighbors(base)
            .iter()
            .filter(|&&(b, e)| {
                profile.iter().enumerate().all(|(s, &p)| {
                    if self.steps_up(e, s, base, b) {
                        p < self.n
                    } else {
                        p > 1
                    }
                })
            })
            .count()
    }

    fn check_profile(&self, x: &ExpandedVertex, base: usize, profile: &[u64]) -> Result<()> {
        let invalid = |reason: String| Error::InvalidVertex {
            code: x.to_string(),
            reason,
        };
        if base >= self.base.vertex_count() {
            return Err(invalid(format!("base vertex {base} out of range")));
        }
        if profile.len() != self.k() {
            return Err(invalid(format!(
                "profile has {} entries, expected {}",
                profile.len(),
                self.k()
            )));
        }
        if let Some(p) = profile.iter().find(|&&p| p == 0 || p > self.n) {
            return Err(invalid(format!("profile entry {p} outside 1..={}", self.n)));
        }
        Ok(())
    }

    pub fn validate(&self, x: &ExpandedVertex) -> Result<()> {
        match x {
            ExpandedVertex::V1 {
                slot,
                base,
                profile,
            } => {
                self.check_profile(x, *base, profile)?;
                if *slot == 0 || *slot > self.degree {
                    return Err(Error::InvalidVertex {
                        code: x.to_string(),
                        reason: format!("slot {slot} outside 1..={}", self.degree),
                    });
                }
            }
            ExpandedVertex::V0 { base, profile, pad } => {
                self.check_profile(x, *base, profile)?;
                let pads = self.degree - self.v1_degree(*base, profile);
                if *pad == 0 || *pad > pads {
                    return Err(Error::InvalidVertex {
                        code: x.to_string(),
                        reason: format!("pad index {pad} outside 1..={pads}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// The `d` neighbors of `x`: lifted `V1` neighbors in base-neighbor
    /// order followed by the tuple's padding vertices.
    pub fn neighbors(&self, x: &ExpandedVertex) -> Result<Vec<ExpandedVertex>> {
        self.validate(x)?;
        let mut out = Vec::with_capacity(self.degree);
        match x {
            ExpandedVertex::V1 {
                slot,
                base,
                profile,
            } => {
                for &(b, e) in self.base.neighbors(*base) {
                    if let Some(q) = self.lift_profile(*base, b, e, profile) {
                        out.push(ExpandedVertex::V1 {
                            slot: *slot,
                            base: b,
                            profile: q,
                        });
                    }
                }
                let k = out.len();
                for pad in 1..=self.degree - k {
                    out.push(ExpandedVertex::V0 {
                        base: *base,
                        profile: profile.clone(),
                        pad,
                    });
                }
            }
            ExpandedVertex::V0 { base, profile, .. } => {
                for slot in 1..=self.degree {
                    out.push(ExpandedVertex::V1 {
                        slot,
                        base: *base,
                        profile: profile.clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    /// The projection `f` onto the base graph.
    pub fn project(&self, x: &ExpandedVertex) -> usize {
        x.base()
    }

    /// The potential `p_O(x)` for `O = S[position]`; padding vertices carry
    /// the value of their tuple.
    pub fn potential_value(&self, position: usize, x: &ExpandedVertex) -> Result<u64> {
        if position >= self.k() {
            return Err(Error::InvalidParams(format!(
                "orientation position {position} out of range (K = {})",
                self.k()
            )));
        }
        self.validate(x)?;
        Ok(x.profile()[position])
    }

    /// Direction of the expansion edge `(x, y)` copied from `o` on the
    /// projected base edge. Both endpoints must be `V1` vertices.
    pub fn lift_orientation_direction(
        &self,
        o: &Orientation,
        x: &ExpandedVertex,
        y: &ExpandedVertex,
    ) -> Result<Direction> {
        o.check_graph(&self.base)?;
        if x.is_v0() || y.is_v0() {
            return Err(Error::NotAnEdge(format!(
                "({x}, {y}) touches a padding vertex; the lift is undefined there"
            )));
        }
        if !self.neighbors(x)?.contains(y) {
            return Err(Error::NotAnEdge(format!("({x}, {y})")));
        }
        o.direction(&self.base, x.base(), y.base())
            .ok_or_else(|| Error::NotAnEdge(format!("({x}, {y}) has no base edge")))
    }
}
