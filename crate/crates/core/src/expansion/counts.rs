use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow};
use serde::Serialize;

use crate::io::biguint_string;
use crate::Rational;

/// Exact vertex counts of an expansion.
///
/// With `P = N^K` profiles and `Q = (N−1)^K` profiles that lift along a
/// given base edge:
/// `v1 = d·|V(G)|·P`, `fiber = 2d·P − d·Q`, `total = |V(G)|·fiber`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionCounts {
    #[serde(with = "biguint_string")]
    pub v1_count: BigUint,
    #[serde(with = "biguint_string")]
    pub v0_count: BigUint,
    #[serde(with = "biguint_string")]
    pub total_count: BigUint,
    #[serde(with = "biguint_string")]
    pub fiber_size: BigUint,
}

impl ExpansionCounts {
    pub fn new(d: usize, base_vertices: usize, n: &BigUint, k: usize) -> Self {
        let d = BigUint::from(d);
        let profiles: BigUint = Pow::pow(n, k);
        let lifting: BigUint = Pow::pow(&(n - BigUint::one()), k);
        let fiber_size = BigUint::from(2u32) * &d * &profiles - &d * lifting;
        let v1_count = &d * BigUint::from(base_vertices) * profiles;
        let total_count = BigUint::from(base_vertices) * &fiber_size;
        let v0_count = &total_count - &v1_count;
        Self {
            v1_count,
            v0_count,
            total_count,
            fiber_size,
        }
    }

    /// `|V0| / |V(F)|`.
    pub fn v0_fraction(&self) -> Rational {
        Rational::new(
            BigInt::from(self.v0_count.clone()),
            BigInt::from(self.total_count.clone()),
        )
    }

    /// The padding bound `|V0| < (2K/N)·|V1|`, decided exactly.
    pub fn padding_bound_holds(&self, n: &BigUint, k: usize) -> bool {
        &self.v0_count * n < BigUint::from(2 * k) * &self.v1_count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::tests::toy;

    #[test]
    fn flagship_counts() {
        let c = ExpansionCounts::new(2, 4, &BigUint::from(2u32), 16);
        assert_eq!(c.fiber_size, BigUint::from(262_142u32));
        assert_eq!(c.total_count, BigUint::from(1_048_568u32));
        assert_eq!(c.v1_count, BigUint::from(524_288u32));
        assert_eq!(c.v0_count, BigUint::from(524_280u32));
        assert!(c.padding_bound_holds(&BigUint::from(2u32), 16));
    }

    #[test]
    fn n_one_balances_v0_and_v1() {
        for d in 1..=4usize {
            let c = ExpansionCounts::new(d, 2 * d, &BigUint::one(), 3);
            assert_eq!(c.fiber_size, BigUint::from(2 * d));
            assert_eq!(c.v0_count, c.v1_count);
        }
    }

    #[test]
    fn toy_counts_match_brute_force_enumeration() {
        let p = toy();
        let c = p.counts();
        assert_eq!(c.fiber_size, BigUint::from(8u32));
        assert_eq!(c.total_count, BigUint::from(32u32));
        assert_eq!(c.v1_count, BigUint::from(24u32));
        assert_eq!(c.v0_count, BigUint::from(8u32));

        // Enumerate every tuple and count its pads directly.
        let (d, n) = (p.degree(), p.n());
        let mut v0 = 0usize;
        let mut per_fiber = vec![0usize; p.base().vertex_count()];
        for base in 0..p.base().vertex_count() {
            for q in 1..=n {
                let pads = d - p.v1_degree(base, &[q]);
                v0 += pads;
                per_fiber[base] += d + pads;
            }
        }
        assert_eq!(v0, 8);
        assert!(per_fiber.iter().all(|&f| f == 8));
        assert_eq!(c.v0_fraction(), Rational::new(1.into(), 4.into()));
    }
}
