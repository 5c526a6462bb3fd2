use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

use super::{ExpandedVertex, ExpansionParams};
use crate::error::{Error, Result};

/// Rejection attempts allowed per unit of degree before the padding
/// sampler reports failure.
pub const REJECTION_RETRIES_PER_DEGREE: usize = 64;

fn uniform_profile<R: Rng + ?Sized>(params: &ExpansionParams, rng: &mut R) -> Vec<u64> {
    (0..params.k()).map(|_| rng.gen_range(1..=params.n())).collect()
}

/// A uniformly random vertex of the fiber `f⁻¹(a)`.
///
/// The `V1` part of every fiber has `d·N^K` vertices out of `fiber_size`;
/// the branch is chosen with that exact probability. Padding vertices are
/// drawn by rejection: a uniform profile with `V1`-degree `k` is kept with
/// probability `(d − k)/d`, then a pad index is drawn uniformly from
/// `1..=d−k`.
pub fn sample_uniform_in_fiber<R: Rng + ?Sized>(
    params: &ExpansionParams,
    a: usize,
    rng: &mut R,
) -> Result<ExpandedVertex> {
    if a >= params.base().vertex_count() {
        return Err(Error::InvalidParams(format!(
            "base vertex {a} out of range"
        )));
    }
    let d = params.degree();
    let counts = params.counts();
    let v1_part = &counts.v1_count / BigUint::from(params.base().vertex_count());
    let draw = rng.gen_biguint_below(&counts.fiber_size);
    if draw < v1_part {
        return Ok(ExpandedVertex::V1 {
            slot: rng.gen_range(1..=d),
            base: a,
            profile: uniform_profile(params, rng),
        });
    }
    let attempts = REJECTION_RETRIES_PER_DEGREE * d;
    for _ in 0..attempts {
        let profile = uniform_profile(params, rng);
        let pads = d - params.v1_degree(a, &profile);
        if rng.gen_range(0..d) < pads {
            return Ok(ExpandedVertex::V0 {
                base: a,
                profile,
                pad: rng.gen_range(1..=pads),
            });
        }
    }
    Err(Error::SamplerExhausted { attempts })
}

/// A uniformly random vertex of the expansion: fibers are equinumerous, so
/// a uniform base vertex followed by a fiber-uniform draw is exact.
pub fn sample_uniform_vertex<R: Rng + ?Sized>(
    params: &ExpansionParams,
    rng: &mut R,
) -> Result<ExpandedVertex> {
    let a = rng.gen_range(0..params.base().vertex_count());
    sample_uniform_in_fiber(params, a, rng)
}
