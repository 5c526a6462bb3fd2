//! Towers of expansions starting from `K_{d,d}`.
//!
//! Level 1 is `K_{d,d}` and level `n+1` is the expansion of level `n` with
//! the `n`-th step of a [`Schedule`]. A level is materialized while its exact
//! size stays under the limit, held implicitly (by its expansion parameters
//! over the last explicit level) one step past that, and tracked by
//! [`SymbolicSize`] counts only beyond.

mod measure;
mod symbolic;

pub use measure::{
    fiber_deviation, level_measure_check, tail_check, two_pow_neg, v0_fraction, FiberReport, TailReport,
    V0Measure,
};
pub use symbolic::{Magnitude, SymbolicSize, EXACT_BIT_BUDGET};

use std::sync::Arc;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{
    ExpandedVertex, ExpansionParams, Materialized, SubsetSpec, MAX_EDGES_FOR_ALL_ORIENTATIONS,
};
use crate::graph::{make_complete_bipartite, FiniteGraph};
use crate::Rational;

/// Default cap on materialized level sizes.
pub const DEFAULT_LIMIT: u64 = 1 << 22;

/// How the orientation subset of one desk step is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetRule {
    All,
    /// `size` distinct orientation indices drawn uniformly with a seeded RNG.
    Random { size: usize, seed: u64 },
}

/// One desk step: the range `N` and the subset rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeskStep {
    pub n: u64,
    pub subset: SubsetRule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// `N_n = 2^{n+1}·2^{|E(G_n)|}` with every orientation of `G_n`.
    Paper,
    /// Explicit steps; step `i` builds level `i + 1`.
    Desk(Vec<DeskStep>),
}

impl Schedule {
    pub fn is_paper(&self) -> bool {
        matches!(self, Schedule::Paper)
    }
}

/// What to do when a level is too large to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub limit: u64,
    pub require_explicit: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            limit: DEFAULT_LIMIT,
            require_explicit: false,
        }
    }
}

#[derive(Debug, Clone)]
pub enum LevelGraph {
    /// The root `K_{d,d}`.
    Root(Arc<FiniteGraph>),
    Materialized(Arc<Materialized>),
    /// Known through its neighbor oracle over the previous, explicit level.
    Implicit(Arc<ExpansionParams>),
    Symbolic { reason: String },
}

/// Counts of the step that produced a level.
#[derive(Debug, Clone, Serialize)]
pub struct StepCounts {
    #[serde(rename = "N")]
    pub n: SymbolicSize,
    #[serde(rename = "K")]
    pub k: SymbolicSize,
    pub fiber_size: SymbolicSize,
    pub v1_count: SymbolicSize,
    pub v0_count: SymbolicSize,
    /// `K/N`, an upper bound on the padding fraction, when known exactly.
    #[serde(skip)]
    pub k_over_n: Option<Rational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelCounts {
    pub vertices: SymbolicSize,
    pub edges: SymbolicSize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<StepCounts>,
}

#[derive(Debug, Clone)]
pub struct Level {
    pub index: usize,
    pub graph: LevelGraph,
    pub counts: LevelCounts,
}

impl Level {
    pub fn kind(&self) -> &'static str {
        match self.graph {
            LevelGraph::Root(_) => "root",
            LevelGraph::Materialized(_) => "materialized",
            LevelGraph::Implicit(_) => "implicit",
            LevelGraph::Symbolic { .. } => "symbolic",
        }
    }

    /// The explicit graph of this level, if there is one.
    pub fn graph(&self) -> Option<&FiniteGraph> {
        match &self.graph {
            LevelGraph::Root(g) => Some(g),
            LevelGraph::Materialized(m) => Some(m.graph()),
            _ => None,
        }
    }

    /// Parameters of the step that produced this level.
    pub fn params(&self) -> Option<&ExpansionParams> {
        match &self.graph {
            LevelGraph::Materialized(m) => Some(m.params()),
            LevelGraph::Implicit(p) => Some(p),
            _ => None,
        }
    }

    pub fn materialized(&self) -> Option<&Materialized> {
        match &self.graph {
            LevelGraph::Materialized(m) => Some(m),
            _ => None,
        }
    }
}

/// A vertex of some level: an index into an explicit level, or a code of an
/// implicit one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelVertex {
    Id(usize),
    Coded(ExpandedVertex),
}

#[derive(Debug, Clone)]
pub struct Tower {
    d: usize,
    schedule: Schedule,
    levels: Vec<Level>,
}

fn random_subset(edge_count: usize, size: usize, seed: u64) -> Result<Vec<BigUint>> {
    let space = BigUint::one() << edge_count;
    if BigUint::from(size) > space {
        return Err(Error::Config(format!(
            "subset size {size} exceeds the 2^{edge_count} orientations"
        )));
    }
    if size == 0 {
        return Err(Error::Config("subset size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<BigUint> = Vec::with_capacity(size);
    while out.len() < size {
        let i = rng.gen_biguint_below(&space);
        if !out.contains(&i) {
            out.push(i);
        }
    }
    Ok(out)
}

impl Tower {
    /// Builds levels `1..=depth`.
    pub fn build(d: usize, schedule: Schedule, depth: usize, opts: BuildOptions) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        if depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if let Schedule::Desk(steps) = &schedule {
            if steps.len() < depth - 1 {
                return Err(Error::Config(format!(
                    "desk schedule has {} steps but depth {depth} needs {}",
                    steps.len(),
                    depth - 1
                )));
            }
            if let Some(s) = steps.iter().find(|s| s.n == 0) {
                return Err(Error::Config(format!("desk N must be at least 1, got {}", s.n)));
            }
        }
        let root = Arc::new(make_complete_bipartite(d)?);
        let v = SymbolicSize::int(2 * d as u64);
        let mut levels = vec![Level {
            index: 1,
            graph: LevelGraph::Root(root),
            counts: LevelCounts {
                edges: SymbolicSize::int((d * d) as u64),
                vertices: v,
                step: None,
            },
        }];
        for n in 1..depth {
            let next = Self::next_level(d, &schedule, &levels[n - 1], opts)?;
            levels.push(next);
        }
        Ok(Self {
            d,
            schedule,
            levels,
        })
    }

    fn step_counts(d: usize, schedule: &Schedule, prev: &Level) -> StepCounts {
        let n_index = prev.index;
        let edges = &prev.counts.edges;
        let (n, k, k_over_n) = match schedule {
            Schedule::Paper => {
                let k = SymbolicSize::pow2(edges);
                let n = SymbolicSize::mul(&SymbolicSize::int(1u64 << (n_index + 1)), &k);
                // K_n / N_n = 2^{-(n+1)} by construction.
                let ratio = Rational::new(BigInt::one(), BigInt::one() << (n_index + 1));
                (n, k, Some(ratio))
            }
            Schedule::Desk(steps) => {
                let step = &steps[n_index - 1];
                let k = match step.subset {
                    SubsetRule::All => SymbolicSize::pow2(edges),
                    SubsetRule::Random { size, .. } => SymbolicSize::int(size as u64),
                };
                let ratio = k
                    .exact()
                    .map(|k| Rational::new(BigInt::from(k.clone()), BigInt::from(step.n)));
                (SymbolicSize::int(step.n), k, ratio)
            }
        };
        let dd = SymbolicSize::int(d as u64);
        let profiles = SymbolicSize::pow(&n, &k);
        let gap = SymbolicSize::power_gap(&n, &k);
        let per_fiber_v1 = SymbolicSize::mul(&dd, &profiles);
        let per_fiber_v0 = SymbolicSize::mul(&dd, &gap);
        let base = &prev.counts.vertices;
        StepCounts {
            fiber_size: SymbolicSize::add(&per_fiber_v1, &per_fiber_v0),
            v1_count: SymbolicSize::mul(base, &per_fiber_v1),
            v0_count: SymbolicSize::mul(base, &per_fiber_v0),
            n,
            k,
            k_over_n,
        }
    }

    fn next_level(d: usize, schedule: &Schedule, prev: &Level, opts: BuildOptions) -> Result<Level> {
        let step = Self::step_counts(d, schedule, prev);
        let vertices = SymbolicSize::mul(&prev.counts.vertices, &step.fiber_size);
        let edges = SymbolicSize::div(
            &SymbolicSize::mul(&SymbolicSize::int(d as u64), &vertices),
            &SymbolicSize::int(2u32),
        );
        let index = prev.index + 1;
        let graph = match prev.graph() {
            None => LevelGraph::Symbolic {
                reason: format!("level {} has no explicit graph", prev.index),
            },
            Some(g) => match Self::params_for(schedule, prev.index, g)? {
                Err(reason) => LevelGraph::Symbolic { reason },
                Ok(params) => {
                    let fits = vertices
                        .exact()
                        .and_then(|v| v.to_u64())
                        .is_some_and(|v| v <= opts.limit);
                    if fits {
                        LevelGraph::Materialized(Arc::new(Materialized::build(&params, opts.limit)?))
                    } else {
                        LevelGraph::Implicit(Arc::new(params))
                    }
                }
            },
        };
        if opts.require_explicit && !matches!(graph, LevelGraph::Materialized(_)) {
            return Err(Error::MaterializationRefused {
                total: vertices.describe(),
                limit: opts.limit,
            });
        }
        Ok(Level {
            index,
            graph,
            counts: LevelCounts {
                vertices,
                edges,
                step: Some(step),
            },
        })
    }

    /// Parameters of step `n_index` over `g`, or the reason the step cannot
    /// be represented. Configuration errors are returned as errors.
    fn params_for(
        schedule: &Schedule,
        n_index: usize,
        g: &FiniteGraph,
    ) -> Result<std::result::Result<ExpansionParams, String>> {
        let graph = Arc::new(g.clone());
        let all_too_many = g.edge_count() > MAX_EDGES_FOR_ALL_ORIENTATIONS;
        let too_many = || {
            format!(
                "a profile over all 2^{} orientations is not representable",
                g.edge_count()
            )
        };
        match schedule {
            Schedule::Paper => {
                let exponent = n_index + 1 + g.edge_count();
                if all_too_many || exponent >= 64 {
                    return Ok(Err(too_many()));
                }
                ExpansionParams::new(graph, 1u64 << exponent, SubsetSpec::All).map(Ok)
            }
            Schedule::Desk(steps) => {
                let step = &steps[n_index - 1];
                let subset = match step.subset {
                    SubsetRule::All if all_too_many => return Ok(Err(too_many())),
                    SubsetRule::All => SubsetSpec::All,
                    SubsetRule::Random { size, seed } => {
                        SubsetSpec::Indices(random_subset(g.edge_count(), size, seed)?)
                    }
                };
                ExpansionParams::new(graph, step.n, subset).map(Ok)
            }
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Level `n`, 1-based.
    pub fn level(&self, n: usize) -> Result<&Level> {
        if n == 0 || n > self.levels.len() {
            return Err(Error::LevelUnavailable {
                level: n,
                reason: format!("the tower has levels 1..={}", self.levels.len()),
            });
        }
        Ok(&self.levels[n - 1])
    }

    /// Deepest level that has a graph or a neighbor oracle.
    pub fn representable_depth(&self) -> usize {
        self.levels
            .iter()
            .take_while(|l| !matches!(l.graph, LevelGraph::Symbolic { .. }))
            .count()
    }

    fn unavailable(n: usize, reason: &str) -> Error {
        Error::LevelUnavailable {
            level: n,
            reason: reason.to_string(),
        }
    }

    /// The code of a level vertex as an expanded vertex (levels ≥ 2).
    pub fn expanded(&self, n: usize, v: &LevelVertex) -> Result<ExpandedVertex> {
        match (&self.level(n)?.graph, v) {
            (LevelGraph::Materialized(m), LevelVertex::Id(id)) if *id < m.vertex_count() => {
                Ok(m.code(*id))
            }
            (LevelGraph::Implicit(p), LevelVertex::Coded(x)) => {
                p.validate(x)?;
                Ok(x.clone())
            }
            _ => Err(Self::unavailable(n, "vertex does not belong to this level")),
        }
    }

    /// Converts an expanded vertex to this level's representation.
    pub fn from_expanded(&self, n: usize, x: ExpandedVertex) -> Result<LevelVertex> {
        match &self.level(n)?.graph {
            LevelGraph::Materialized(m) => m
                .index_of(&x)
                .map(LevelVertex::Id)
                .ok_or_else(|| Error::InvalidVertex {
                    code: x.to_string(),
                    reason: format!("not a vertex of level {n}"),
                }),
            LevelGraph::Implicit(p) => {
                p.validate(&x)?;
                Ok(LevelVertex::Coded(x))
            }
            _ => Err(Self::unavailable(n, "level has no coded vertices")),
        }
    }

    /// The projection `f_{n−1}` from level `n` to an index of level `n − 1`.
    pub fn project(&self, n: usize, v: &LevelVertex) -> Result<usize> {
        if n < 2 {
            return Err(Self::unavailable(n, "level 1 has no projection"));
        }
        Ok(self.expanded(n, v)?.base())
    }

    pub fn neighbors(&self, n: usize, v: &LevelVertex) -> Result<Vec<LevelVertex>> {
        let level = self.level(n)?;
        match (&level.graph, v) {
            (LevelGraph::Root(g), LevelVertex::Id(id)) if *id < g.vertex_count() => {
                Ok(g.neighbors(*id).iter().map(|&(u, _)| LevelVertex::Id(u)).collect())
            }
            (LevelGraph::Materialized(m), LevelVertex::Id(id)) if *id < m.vertex_count() => Ok(m
                .graph()
                .neighbors(*id)
                .iter()
                .map(|&(u, _)| LevelVertex::Id(u))
                .collect()),
            (LevelGraph::Implicit(p), LevelVertex::Coded(x)) => {
                Ok(p.neighbors(x)?.into_iter().map(LevelVertex::Coded).collect())
            }
            (LevelGraph::Symbolic { reason }, _) => Err(Self::unavailable(n, reason)),
            _ => Err(Self::unavailable(n, "vertex does not belong to this level")),
        }
    }

    pub fn is_v0(&self, n: usize, v: &LevelVertex) -> Result<bool> {
        match (&self.level(n)?.graph, v) {
            (LevelGraph::Root(_), _) => Ok(false),
            (LevelGraph::Materialized(m), LevelVertex::Id(id)) => Ok(m.is_v0(*id)),
            (_, LevelVertex::Coded(x)) => Ok(x.is_v0()),
            _ => Err(Self::unavailable(n, "vertex does not belong to this level")),
        }
    }

    /// Human-readable vertex label: the index at level 1, the code above.
    pub fn label(&self, n: usize, v: &LevelVertex) -> Result<String> {
        if n == 1 {
            return match v {
                LevelVertex::Id(id) => Ok(id.to_string()),
                LevelVertex::Coded(_) => Err(Self::unavailable(1, "level 1 has no codes")),
            };
        }
        Ok(self.expanded(n, v)?.to_string())
    }
}

/// Tower configuration as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerConfig {
    pub d: usize,
    pub depth: usize,
    pub schedule: ScheduleConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<StepConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepConfig {
    #[serde(rename = "N")]
    pub n: u64,
    pub subset: SubsetConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubsetConfig {
    Named(String),
    Random { size: usize, seed: u64 },
}

impl TowerConfig {
    pub fn schedule(&self) -> Result<Schedule> {
        match self.schedule.mode.as_str() {
            "paper" => Ok(Schedule::Paper),
            "desk" => self
                .schedule
                .levels
                .iter()
                .map(|s| {
                    let subset = match &s.subset {
                        SubsetConfig::Named(name) if name == "all" => SubsetRule::All,
                        SubsetConfig::Named(other) => {
                            return Err(Error::Config(format!("unknown subset rule {other:?}")))
                        }
                        SubsetConfig::Random { size, seed } => SubsetRule::Random {
                            size: *size,
                            seed: *seed,
                        },
                    };
                    Ok(DeskStep { n: s.n, subset })
                })
                .collect::<Result<_>>()
                .map(Schedule::Desk),
            other => Err(Error::Config(format!("unknown schedule mode {other:?}"))),
        }
    }

    pub fn build(&self, opts: BuildOptions) -> Result<Tower> {
        Tower::build(self.d, self.schedule()?, self.depth, opts)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// `d = 2`, `N = 3`, one random orientation per step.
    pub(crate) fn desk(depth: usize) -> Tower {
        let steps = (1..depth)
            .map(|i| DeskStep {
                n: 3,
                subset: SubsetRule::Random {
                    size: 1,
                    seed: i as u64,
                },
            })
            .collect();
        Tower::build(2, Schedule::Desk(steps), depth, BuildOptions::default()).unwrap()
    }

    #[test]
    fn desk_tower_counts_match_enumeration() {
        let t = desk(3);
        assert_eq!(t.depth(), 3);
        assert_eq!(t.level(2).unwrap().kind(), "materialized");
        assert_eq!(t.level(3).unwrap().kind(), "materialized");
        let sizes: Vec<_> = t
            .levels()
            .iter()
            .map(|l| l.counts.vertices.exact().unwrap().to_u64().unwrap())
            .collect();
        assert_eq!(sizes, vec![4, 32, 256]);
        for l in t.levels() {
            if let Some(g) = l.graph() {
                assert_eq!(g.vertex_count() as u64, l.counts.vertices.exact().unwrap().to_u64().unwrap());
                assert_eq!(g.edge_count() as u64, l.counts.edges.exact().unwrap().to_u64().unwrap());
                assert_eq!(g.regular_degree(), Some(2));
                assert!(g.bipartition().is_some());
            }
        }
        let step3 = t.level(3).unwrap().counts.step.as_ref().unwrap();
        assert_eq!(step3.fiber_size.exact(), Some(&BigUint::from(8u32)));
    }

    #[test]
    fn paper_schedule_level_two_is_exact_for_d2() {
        let t = Tower::build(2, Schedule::Paper, 2, BuildOptions::default()).unwrap();
        let l2 = t.level(2).unwrap();
        assert_eq!(l2.kind(), "implicit");
        let step = l2.counts.step.as_ref().unwrap();
        assert_eq!(step.n.exact(), Some(&BigUint::from(64u32)));
        assert_eq!(step.k.exact(), Some(&BigUint::from(16u32)));
        let p64 = num_traits::pow(BigUint::from(64u32), 16);
        let p63 = num_traits::pow(BigUint::from(63u32), 16);
        let want = BigUint::from(4u32) * (BigUint::from(4u32) * &p64 - BigUint::from(2u32) * &p63);
        assert_eq!(l2.counts.vertices.exact(), Some(&want));
        let p = l2.params().unwrap();
        assert_eq!((p.n(), p.k()), (64, 16));
    }

    #[test]
    fn paper_schedule_d3_is_symbolic_and_cross_checks() {
        let t = Tower::build(3, Schedule::Paper, 2, BuildOptions::default()).unwrap();
        let step = t.level(2).unwrap().counts.step.as_ref().unwrap();
        assert_eq!(step.n.exact(), Some(&BigUint::from(2048u32)));
        assert_eq!(step.k.exact(), Some(&BigUint::from(512u32)));
        let total = &t.level(2).unwrap().counts.vertices;
        assert!(total.exact().is_none());
        // Independent big-integer evaluation of 6·(2·3·2048^512 − 3·2047^512).
        let p = num_traits::pow(BigUint::from(2048u32), 512);
        let q = num_traits::pow(BigUint::from(2047u32), 512);
        let exact = BigUint::from(6u32) * (BigUint::from(6u32) * p - BigUint::from(3u32) * q);
        let want = Magnitude::from_biguint(&exact).log2_f64().unwrap();
        let got = total.magnitude().log2_f64().unwrap();
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
        assert!(got > 512.0 * 11.0);
    }

    #[test]
    fn paper_schedule_depth_three_has_a_symbolic_top() {
        let t = Tower::build(2, Schedule::Paper, 3, BuildOptions::default()).unwrap();
        assert_eq!(t.level(3).unwrap().kind(), "symbolic");
        assert_eq!(t.representable_depth(), 2);
        let m = t.level(3).unwrap().counts.vertices.magnitude();
        // log2 log2 |V_3| ≈ log2(K_2 · log2 N_2) ≈ |E_2|, itself about 2^100.
        assert_eq!(m.height(), 3);
        let e2 = t.level(2).unwrap().counts.edges.exact().unwrap().bits() as f64;
        assert!((m.value() - e2).abs() < 1.0, "{} vs {e2}", m.value());
    }

    #[test]
    fn require_explicit_refuses_with_the_count() {
        let opts = BuildOptions {
            limit: 31,
            require_explicit: true,
        };
        let steps = vec![DeskStep {
            n: 3,
            subset: SubsetRule::Random { size: 1, seed: 0 },
        }];
        match Tower::build(2, Schedule::Desk(steps), 2, opts) {
            Err(Error::MaterializationRefused { total, limit }) => {
                assert_eq!((total.as_str(), limit), ("32", 31));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn implicit_levels_stack_only_one_deep() {
        let steps = vec![
            DeskStep {
                n: 3,
                subset: SubsetRule::Random { size: 1, seed: 0 },
            };
            3
        ];
        let opts = BuildOptions {
            limit: 10,
            require_explicit: false,
        };
        let t = Tower::build(2, Schedule::Desk(steps), 4, opts).unwrap();
        let kinds: Vec<_> = t.levels().iter().map(Level::kind).collect();
        assert_eq!(kinds, ["root", "implicit", "symbolic", "symbolic"]);
        assert_eq!(t.level(4).unwrap().counts.vertices.exact(), Some(&BigUint::from(2048u32)));
    }

    #[test]
    fn invalid_configurations() {
        assert!(Tower::build(0, Schedule::Paper, 1, BuildOptions::default()).is_err());
        assert!(Tower::build(2, Schedule::Paper, 0, BuildOptions::default()).is_err());
        assert!(Tower::build(2, Schedule::Desk(vec![]), 2, BuildOptions::default()).is_err());
        let zero = vec![DeskStep {
            n: 0,
            subset: SubsetRule::All,
        }];
        assert!(Tower::build(2, Schedule::Desk(zero), 2, BuildOptions::default()).is_err());
        let too_many = vec![DeskStep {
            n: 3,
            subset: SubsetRule::Random { size: 17, seed: 0 },
        }];
        assert!(Tower::build(2, Schedule::Desk(too_many), 2, BuildOptions::default()).is_err());
    }

    #[test]
    fn random_subsets_are_distinct_and_seeded() {
        let a = random_subset(4, 16, 3).unwrap();
        let mut sorted = a.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 16);
        assert_eq!(random_subset(32, 3, 9).unwrap(), random_subset(32, 3, 9).unwrap());
    }

    #[test]
    fn oracle_agrees_with_materialized_adjacency() {
        let t = desk(3);
        let m = t.level(3).unwrap().materialized().unwrap();
        let p = m.params();
        for id in 0..m.vertex_count() {
            let x = m.code(id);
            let via_oracle: Vec<_> = p
                .neighbors(&x)
                .unwrap()
                .into_iter()
                .map(|y| t.from_expanded(3, y).unwrap())
                .collect();
            let mut a = via_oracle;
            let mut b = t.neighbors(3, &LevelVertex::Id(id)).unwrap();
            a.sort();
            b.sort();
            assert_eq!(a, b);
            assert_eq!(t.project(3, &LevelVertex::Id(id)).unwrap(), m.project(id));
        }
    }

    #[test]
    fn config_json() {
        let text = r#"{"d":2,"depth":3,"schedule":{"mode":"desk","levels":[{"N":3,"subset":{"size":1,"seed":1}},{"N":3,"subset":"all"}]}}"#;
        let c: TowerConfig = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), text);
        let s = c.schedule().unwrap();
        assert_eq!(
            s,
            Schedule::Desk(vec![
                DeskStep {
                    n: 3,
                    subset: SubsetRule::Random { size: 1, seed: 1 }
                },
                DeskStep {
                    n: 3,
                    subset: SubsetRule::All
                }
            ])
        );
        let bad: TowerConfig =
            serde_json::from_str(r#"{"d":2,"depth":1,"schedule":{"mode":"weird"}}"#).unwrap();
        assert!(bad.schedule().is_err());
    }
}
