//! Construction and verification toolkit for orientation-product graph
//! expansions.
//!
//! The crate builds the expansion `Expand(G, N)` of a finite `d`-regular
//! graph, stacks expansions into a tower starting from `K_{d,d}`, samples
//! compatible vertex sequences through the tower, and checks every
//! finite-level property exactly: regularity, bipartiteness, equal fibers,
//! potential increments, circulation identities and matchings.

pub mod analysis;
pub mod error;
pub mod expansion;
pub mod graph;
pub mod io;
pub mod sampler;
pub mod tower;

pub mod cli;

pub use error::{Error, Result};

/// Exact rational numbers used for circulations, measures and fractions.
pub type Rational = num_rational::BigRational;
