use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{LevelGraph, Tower};
use crate::error::{Error, Result};
use crate::io::format_rational;
use crate::Rational;

/// The padding measure of a level: exact, or an upper bound when the level
/// is too large to count exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum V0Measure {
    Exact(Rational),
    /// `K/N`. The true fraction is `(N^K − (N−1)^K)/(2N^K − (N−1)^K)`, which
    /// is strictly below `1 − (1 − 1/N)^K ≤ K/N`.
    UpperBound(Rational),
}

impl V0Measure {
    pub fn value(&self) -> &Rational {
        match self {
            V0Measure::Exact(r) | V0Measure::UpperBound(r) => r,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, V0Measure::Exact(_))
    }

    /// Is the true fraction certainly below `t`?
    pub fn certified_below(&self, t: &Rational) -> bool {
        match self {
            V0Measure::Exact(r) => r < t,
            V0Measure::UpperBound(b) => b <= t,
        }
    }
}

impl Serialize for V0Measure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        match self {
            V0Measure::Exact(r) => map.serialize_entry("exact", &format_rational(r))?,
            V0Measure::UpperBound(r) => map.serialize_entry("upper_bound", &format_rational(r))?,
        }
        map.end()
    }
}

/// `2^{-n}`.
pub fn two_pow_neg(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << n)
}

/// `|V0(G_{n+1})| / |V(G_{n+1})|`, the uniform measure of the padding
/// created by step `n`.
pub fn v0_fraction(tower: &Tower, n: usize) -> Result<V0Measure> {
    let level = tower.level(n + 1).map_err(|_| Error::LevelUnavailable {
        level: n + 1,
        reason: format!("the padding fraction of step {n} needs level {}", n + 1),
    })?;
    let step = level.counts.step.as_ref().ok_or_else(|| Error::LevelUnavailable {
        level: n + 1,
        reason: "level has no producing step".into(),
    })?;
    if let (Some(v0), Some(total)) = (step.v0_count.exact(), level.counts.vertices.exact()) {
        return Ok(V0Measure::Exact(Rational::new(
            BigInt::from(v0.clone()),
            BigInt::from(total.clone()),
        )));
    }
    step.k_over_n
        .clone()
        .map(V0Measure::UpperBound)
        .ok_or_else(|| Error::LevelUnavailable {
            level: n + 1,
            reason: "neither the padding count nor K/N is known exactly".into(),
        })
}

/// The sum `Σ_{k>n} ν(V0(G_{k+1}))` against `2^{-n}`.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub from: usize,
    pub terms: Vec<(usize, V0Measure)>,
    /// Certified bound on the terms past the built levels (paper schedule).
    #[serde(serialize_with = "opt_rational")]
    pub remainder: Option<Rational>,
    #[serde(serialize_with = "rational")]
    pub sum_bound: Rational,
    #[serde(serialize_with = "rational")]
    pub target: Rational,
    /// False when the tail past the built levels has no certificate.
    pub complete: bool,
    pub holds: bool,
}

fn rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn opt_rational<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => rational(r, s),
        None => s.serialize_none(),
    }
}

pub fn tail_check(tower: &Tower, n: usize) -> Result<TailReport> {
    let mut terms = Vec::new();
    let mut sum = Rational::zero();
    for k in n + 1..tower.depth() {
        let m = v0_fraction(tower, k)?;
        sum += m.value();
        terms.push((k, m));
    }
    // Under the paper schedule step k contributes less than 2^{-(k+1)}, so
    // the unbuilt steps k ≥ D add less than 2^{-D}.
    let first_unbuilt = tower.depth().max(n + 1);
    let remainder = tower
        .schedule()
        .is_paper()
        .then(|| two_pow_neg(first_unbuilt));
    if let Some(r) = &remainder {
        sum += r;
    }
    let target = two_pow_neg(n);
    let complete = remainder.is_some();
    Ok(TailReport {
        from: n,
        holds: sum < target,
        terms,
        remainder,
        sum_bound: sum,
        target,
        complete,
    })
}

/// Fiber sizes of a projection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub base_count: usize,
    pub min_fiber: usize,
    pub max_fiber: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<usize>,
    pub deviation: usize,
    pub passed: bool,
}

/// Fiber statistics of an arbitrary map `projection: [0, len) → [0, base_count)`.
pub fn fiber_deviation(projection: &[usize], base_count: usize, expected: Option<usize>) -> FiberReport {
    let mut sizes = vec![0usize; base_count];
    for &a in projection {
        sizes[a] += 1;
    }
    let min_fiber = sizes.iter().copied().min().unwrap_or(0);
    let max_fiber = sizes.iter().copied().max().unwrap_or(0);
    let deviation = max_fiber - min_fiber;
    FiberReport {
        base_count,
        min_fiber,
        max_fiber,
        expected,
        deviation,
        passed: deviation == 0 && expected.is_none_or(|e| e == min_fiber),
    }
}

/// All fibers of `f_n: G_{n+1} → G_n` have the predicted size.
pub fn level_measure_check(tower: &Tower, n: usize) -> Result<FiberReport> {
    let upper = tower.level(n + 1)?;
    let LevelGraph::Materialized(m) = &upper.graph else {
        return Err(Error::LevelUnavailable {
            level: n + 1,
            reason: "the measure check needs an explicit level".into(),
        });
    };
    let projection: Vec<usize> = (0..m.vertex_count()).map(|id| m.project(id)).collect();
    let expected = m.counts().fiber_size.to_usize();
    Ok(fiber_deviation(
        &projection,
        m.params().base().vertex_count(),
        expected,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::tests::desk;
    use crate::tower::{BuildOptions, DeskStep, Schedule, SubsetRule};

    fn frac(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn paper_d2_step_one_is_exact_and_below_one_half() {
        let t = Tower::build(2, Schedule::Paper, 2, BuildOptions::default()).unwrap();
        let m = v0_fraction(&t, 1).unwrap();
        let p = BigInt::from(64).pow(16);
        let q = BigInt::from(63).pow(16);
        let want = Rational::new(&p - &q, BigInt::from(2) * &p - &q);
        assert_eq!(m, V0Measure::Exact(want.clone()));
        assert!(m.certified_below(&two_pow_neg(1)));
        // It also sits under K/N = 1/4 and 2K/N = 1/2.
        assert!(want < frac(1, 4));
    }

    #[test]
    fn symbolic_steps_fall_back_to_the_certified_bound() {
        let t = Tower::build(2, Schedule::Paper, 3, BuildOptions::default()).unwrap();
        let m = v0_fraction(&t, 2).unwrap();
        assert_eq!(m, V0Measure::UpperBound(frac(1, 8)));
        assert!(m.certified_below(&two_pow_neg(2)));
        let t3 = Tower::build(3, Schedule::Paper, 2, BuildOptions::default()).unwrap();
        assert_eq!(v0_fraction(&t3, 1).unwrap(), V0Measure::UpperBound(frac(1, 4)));
        assert!(v0_fraction(&t3, 2).is_err());
    }

    #[test]
    fn desk_and_trivial_fractions() {
        let t = desk(3);
        assert_eq!(v0_fraction(&t, 1).unwrap(), V0Measure::Exact(frac(1, 4)));
        assert_eq!(v0_fraction(&t, 2).unwrap(), V0Measure::Exact(frac(1, 4)));
        let ones = vec![
            DeskStep {
                n: 1,
                subset: SubsetRule::All,
            };
            1
        ];
        let t1 = Tower::build(2, Schedule::Desk(ones), 2, BuildOptions::default()).unwrap();
        assert_eq!(v0_fraction(&t1, 1).unwrap(), V0Measure::Exact(frac(1, 2)));
    }

    #[test]
    fn paper_tail_sums_stay_below_target() {
        for depth in 1..=4 {
            let t = Tower::build(2, Schedule::Paper, depth, BuildOptions::default()).unwrap();
            for n in 0..=depth {
                let r = tail_check(&t, n).unwrap();
                assert!(r.complete);
                assert!(r.holds, "depth {depth}, n {n}: {:?}", r.sum_bound);
            }
        }
    }

    #[test]
    fn desk_tail_is_reported_as_a_prefix() {
        let r = tail_check(&desk(3), 0).unwrap();
        assert!(!r.complete);
        assert_eq!(r.sum_bound, frac(1, 2));
        assert!(r.holds);
        assert_eq!(r.terms.len(), 2);
    }

    #[test]
    fn explicit_levels_have_equal_fibers() {
        let t = desk(3);
        let sizes: Vec<_> = (1..3)
            .map(|n| level_measure_check(&t, n).unwrap())
            .inspect(|r| assert!(r.passed && r.deviation == 0))
            .map(|r| r.min_fiber)
            .collect();
        assert_eq!(sizes, vec![8, 8]);
        assert!(level_measure_check(&t, 3).is_err());
    }

    #[test]
    fn skewed_map_is_caught() {
        let r = fiber_deviation(&[0, 0, 0, 1, 2, 2], 3, Some(2));
        assert_eq!((r.min_fiber, r.max_fiber, r.deviation), (1, 3, 2));
        assert!(!r.passed);
        let even = fiber_deviation(&[0, 1, 2, 0, 1, 2], 3, Some(3));
        assert!(!even.passed, "right shape, wrong size");
        assert!(fiber_deviation(&[0, 1, 2, 0, 1, 2], 3, Some(2)).passed);
    }
}
