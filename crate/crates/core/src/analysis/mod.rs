//! Circulations against potentials: defect sets, orientation fitting,
//! aligned-circulation optima and the matching demonstration.

mod demo;
mod flow;
mod knowhow;
mod lift;

pub use demo::{matching_paradox_demo, orientation_by_sign, run_demo, DemoReport, POTENTIAL_PAIRING};
pub use flow::{is_acyclic, max_aligned_circulation, AlignedCirculation};
pub use knowhow::{build_knowhow_potential, circulation_mass_bound_check, knowhow_defect, DefectReport, MassReport};
pub use lift::{
    adversarial_optimum, best_level_orientation, block_optimum, disagreement, lifted_orientation,
    removed_block_edges, v1_edge_mask, LevelFit, V0Rule,
};
