use num_traits::{Signed, Zero};
use serde::Serialize;

use super::lift::ratio;
use crate::error::{Error, Result};
use crate::expansion::Materialized;
use crate::graph::{is_circulation, potential_pairing, Circulation, FiniteGraph, Orientation, Potential};
use crate::io::rational_string;
use crate::Rational;

/// `g(x) = p_{S[position]}(x)` on every vertex of `m`.
pub fn build_knowhow_potential(m: &Materialized, position: usize) -> Result<Potential> {
    if position >= m.params().k() {
        return Err(Error::InvalidParams(format!(
            "orientation position {position} out of range (K = {})",
            m.params().k()
        )));
    }
    Ok(Potential::new(
        (0..m.vertex_count())
            .map(|id| m.potential(position, id) as i64)
            .collect(),
    ))
}

/// Edges whose oriented step fails to raise the potential by exactly one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectReport {
    pub total_edges: usize,
    pub defect_edges: usize,
    /// Defects with a padding endpoint.
    pub v0_incident: usize,
    /// Defects between two `V1` vertices.
    pub level_disagreement: usize,
    #[serde(with = "rational_string")]
    pub fraction: Rational,
    /// `Σ |f_e|` over defect edges, when a circulation was supplied.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_rational")]
    pub defect_l1: Option<Rational>,
}

fn opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => rational_string::serialize(r, s),
        None => s.serialize_none(),
    }
}

pub fn knowhow_defect(
    m: &Materialized,
    omega: &Orientation,
    g: &Potential,
    f: Option<&Circulation>,
) -> Result<DefectReport> {
    let graph = m.graph();
    omega.check_graph(graph)?;
    g.check_unit_steps(graph)?;
    if let Some(f) = f {
        if f.edge_count() != graph.edge_count() {
            return Err(Error::EdgeCountMismatch {
                expected: graph.edge_count(),
                found: f.edge_count(),
            });
        }
    }
    let (mut v0_incident, mut level_disagreement) = (0, 0);
    let mut defect_l1 = f.map(|_| Rational::zero());
    for (e, &(x, y)) in graph.edges().iter().enumerate() {
        let (t, h) = omega.arc(graph, e);
        if g.value(h) == g.value(t) + 1 {
            continue;
        }
        if m.is_v0(x) || m.is_v0(y) {
            v0_incident += 1;
        } else {
            level_disagreement += 1;
        }
        if let (Some(acc), Some(f)) = (defect_l1.as_mut(), f) {
            *acc += f.value(e).abs();
        }
    }
    let defect_edges = v0_incident + level_disagreement;
    Ok(DefectReport {
        total_edges: graph.edge_count(),
        defect_edges,
        v0_incident,
        level_disagreement,
        fraction: ratio(defect_edges, graph.edge_count()),
        defect_l1,
    })
}

/// The masses of `|f|` split by the potential step along the direction in
/// which `f` is positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport {
    #[serde(with = "rational_string")]
    pub l1_norm: Rational,
    #[serde(with = "rational_string")]
    pub aligned: Rational,
    #[serde(with = "rational_string")]
    pub anti_aligned: Rational,
    #[serde(with = "rational_string")]
    pub flat: Rational,
    /// `‖f‖₁ − 2·anti_aligned − flat`; always zero.
    #[serde(with = "rational_string")]
    pub residual: Rational,
    /// `Σ f·Δg` computed independently by the pairing.
    #[serde(with = "rational_string")]
    pub pairing: Rational,
    /// `anti_aligned + flat`.
    #[serde(with = "rational_string")]
    pub defect_mass: Rational,
    pub identity_holds: bool,
    /// `2·defect_mass ≥ ‖f‖₁`.
    pub bound_holds: bool,
}

/// Checks `‖f‖₁ = 2·anti + flat` for a circulation `f` and a potential with
/// unit steps, and the resulting bound `anti + flat ≥ ‖f‖₁/2`.
pub fn circulation_mass_bound_check(graph: &FiniteGraph, f: &Circulation, g: &Potential) -> Result<MassReport> {
    g.check_unit_steps(graph)?;
    if !is_circulation(graph, f)? {
        return Err(Error::NotCirculation {
            vertex: first_unbalanced(graph, f),
        });
    }
    let (mut aligned, mut anti, mut flat) = (Rational::zero(), Rational::zero(), Rational::zero());
    for (e, &(lo, hi)) in graph.edges().iter().enumerate() {
        let v = f.value(e);
        if v.is_zero() {
            continue;
        }
        let step = g.value(hi) - g.value(lo);
        let along = if v.is_positive() { step } else { -step };
        match along {
            1 => aligned += v.abs(),
            -1 => anti += v.abs(),
            _ => flat += v.abs(),
        }
    }
    let l1_norm = f.l1_norm();
    let residual = &l1_norm - &anti * Rational::from_integer(2.into()) - &flat;
    let pairing = potential_pairing(graph, f, g)?;
    let defect_mass = &anti + &flat;
    Ok(MassReport {
        identity_holds: residual.is_zero() && pairing.is_zero(),
        bound_holds: &defect_mass * Rational::from_integer(2.into()) >= l1_norm,
        l1_norm,
        aligned,
        anti_aligned: anti,
        flat,
        residual,
        pairing,
        defect_mass,
    })
}

fn first_unbalanced(graph: &FiniteGraph, f: &Circulation) -> usize {
    let mut net = vec![Rational::zero(); graph.vertex_count()];
    for (e, &(lo, hi)) in graph.edges().iter().enumerate() {
        net[lo] += f.value(e);
        net[hi] -= f.value(e);
    }
    net.iter().position(|x| !x.is_zero()).unwrap_or(0)
}
