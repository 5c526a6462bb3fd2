use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::Value;

use super::flow::max_aligned_circulation;
use super::knowhow::{build_knowhow_potential, circulation_mass_bound_check, knowhow_defect, DefectReport, MassReport};
use super::lift::{adversarial_optimum, best_level_orientation, lifted_orientation, V0Rule};
use crate::error::Result;
use crate::expansion::{ExpansionParams, Materialized};
use crate::graph::{is_circulation, matching_to_circulation, max_matching, random_circulation, Circulation, Orientation};
use crate::io::{params_value, rational_string};
use crate::Rational;

/// Labels the level pairing used for the potential.
pub const POTENTIAL_PAIRING: &str =
    "single-level analog: potential of the same expansion at the fitted orientation's position";

/// Every intermediate statistic of [`matching_paradox_demo`].
#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub params: Value,
    pub seed: u64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub v0_count: usize,
    pub matching_size: usize,
    pub perfect: bool,
    pub phi_is_circulation: bool,
    #[serde(with = "rational_string")]
    pub phi_l1: Rational,
    /// Defects of `Ω_φ` against `g`.
    #[serde(with = "rational_string")]
    pub defect_fraction: Rational,
    /// `(anti-aligned + flat mass of φ) / ‖φ‖₁`, zero when `φ = 0`.
    #[serde(with = "rational_string")]
    pub defect_mass_fraction: Rational,
    pub best_orientation_index: u64,
    #[serde(with = "rational_string")]
    pub disagreement: Rational,
    pub orientation_in_subset: bool,
    pub potential_position: usize,
    pub potential_pairing: &'static str,
    pub phi_defects: DefectReport,
    pub mass: MassReport,
    /// Defects of the lift of the subset orientation at `potential_position`
    /// against `g`.
    #[serde(with = "rational_string")]
    pub lifted_defect_fraction: Rational,
    /// Optimum over the same lift with adversarial padding directions.
    #[serde(with = "rational_string")]
    pub aligned_circulation_max: Rational,
    pub aligned_circulation_expected: usize,
    pub v0_cut_bound: usize,
    pub cut_bound_holds: bool,
    pub random_circulation_identity_holds: bool,
}

impl DemoReport {
    /// The exact checks the report makes.
    pub fn passed(&self) -> bool {
        self.perfect
            && self.phi_is_circulation
            && self.mass.identity_holds
            && self.mass.bound_holds
            && self.cut_bound_holds
            && self.random_circulation_identity_holds
            && self.aligned_circulation_max == Rational::from_integer(BigInt::from(self.aligned_circulation_expected))
    }
}

/// `Ω_φ`: each edge points the way `φ` is positive; low to high where `φ` is
/// zero.
pub fn orientation_by_sign(f: &Circulation) -> Orientation {
    Orientation::from_bits(f.values().iter().map(|v| v.is_negative()).collect())
}

fn hamming(a: &Orientation, b: &Orientation) -> usize {
    a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count()
}

/// Matching → circulation → orientation fit → potential → mass bound, on one
/// materialized expansion.
pub fn matching_paradox_demo(params: &ExpansionParams, seed: u64, limit: u64) -> Result<DemoReport> {
    let m = Materialized::build(params, limit)?;
    run_demo(&m, seed)
}

pub fn run_demo(m: &Materialized, seed: u64) -> Result<DemoReport> {
    let graph = m.graph();
    let matching = max_matching(graph)?;
    let perfect = 2 * matching.len() == graph.vertex_count();
    let phi = matching_to_circulation(graph, &matching)?;
    let phi_is_circulation = is_circulation(graph, &phi)?;
    let omega = orientation_by_sign(&phi);

    let fit = best_level_orientation(m, &omega)?;
    let params = m.params();
    let exact = (0..params.k()).find(|&s| params.orientation(s) == &fit.orientation);
    let position = exact.unwrap_or_else(|| {
        (0..params.k())
            .min_by_key(|&s| hamming(params.orientation(s), &fit.orientation))
            .expect("the orientation subset is nonempty")
    });
    let g = build_knowhow_potential(m, position)?;

    let phi_defects = knowhow_defect(m, &omega, &g, Some(&phi))?;
    let mass = circulation_mass_bound_check(graph, &phi, &g)?;
    let defect_mass_fraction = if mass.l1_norm.is_zero() {
        Rational::zero()
    } else {
        &mass.defect_mass / &mass.l1_norm
    };

    let chosen = params.orientation(position);
    let plain_lift = lifted_orientation(m, chosen, V0Rule::LowToHigh)?;
    let lifted_defect_fraction = knowhow_defect(m, &plain_lift, &g, None)?.fraction;
    let adversarial = lifted_orientation(m, chosen, V0Rule::Adversarial)?;
    let aligned = max_aligned_circulation(graph, &adversarial, None)?;
    let v0_cut_bound = params.degree() * m.v0_count();
    let cut_bound_holds = aligned.value <= Rational::from_integer(BigInt::from(v0_cut_bound));

    let random = random_circulation(graph, seed, 8);
    let random_circulation_identity_holds = circulation_mass_bound_check(graph, &random, &g)?.identity_holds;

    Ok(DemoReport {
        params: params_value(params),
        seed,
        vertex_count: graph.vertex_count(),
        edge_count: graph.edge_count(),
        v0_count: m.v0_count(),
        matching_size: matching.len(),
        perfect,
        phi_is_circulation,
        phi_l1: mass.l1_norm.clone(),
        defect_fraction: phi_defects.fraction.clone(),
        defect_mass_fraction,
        best_orientation_index: fit.orientation.index().to_u64().unwrap_or(u64::MAX),
        disagreement: fit.disagreement.clone(),
        orientation_in_subset: exact.is_some(),
        potential_position: position,
        potential_pairing: POTENTIAL_PAIRING,
        phi_defects,
        mass,
        lifted_defect_fraction,
        aligned_circulation_max: aligned.value,
        aligned_circulation_expected: adversarial_optimum(m),
        v0_cut_bound,
        cut_bound_holds,
        random_circulation_identity_holds,
    })
}
