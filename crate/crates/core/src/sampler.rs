//! Random compatible vertex sequences through a tower and the local
//! statistics around them.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::{sample_uniform_in_fiber, ExpandedVertex, ExpansionParams};
use crate::tower::{LevelVertex, Tower};

/// Vertices `x_1, …, x_m` with `f_n(x_{n+1}) = x_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPath {
    vertices: Vec<LevelVertex>,
}

impl VertexPath {
    pub fn depth(&self) -> usize {
        self.vertices.len()
    }

    /// `x_n`, 1-based.
    pub fn at(&self, n: usize) -> &LevelVertex {
        &self.vertices[n - 1]
    }

    pub fn vertices(&self) -> &[LevelVertex] {
        &self.vertices
    }
}

fn id_of(v: &LevelVertex, level: usize) -> Result<usize> {
    match v {
        LevelVertex::Id(id) => Ok(*id),
        LevelVertex::Coded(_) => Err(Error::LevelUnavailable {
            level,
            reason: "an implicit level cannot carry another level".into(),
        }),
    }
}

fn params_at(tower: &Tower, level: usize) -> Result<&ExpansionParams> {
    tower.level(level)?.params().ok_or_else(|| Error::LevelUnavailable {
        level,
        reason: "level has no expansion parameters".into(),
    })
}

/// `x_1` uniform on level 1, then each `x_{n+1}` uniform on the fiber over
/// `x_n`.
pub fn sample_path<R: Rng + ?Sized>(tower: &Tower, depth: usize, rng: &mut R) -> Result<VertexPath> {
    if depth == 0 || depth > tower.representable_depth() {
        return Err(Error::LevelUnavailable {
            level: depth,
            reason: format!(
                "paths reach at most level {}",
                tower.representable_depth()
            ),
        });
    }
    let mut vertices = vec![LevelVertex::Id(rng.gen_range(0..2 * tower.d()))];
    for n in 1..depth {
        let below = id_of(&vertices[n - 1], n)?;
        let x = sample_uniform_in_fiber(params_at(tower, n + 1)?, below, rng)?;
        vertices.push(tower.from_expanded(n + 1, x)?);
    }
    Ok(VertexPath { vertices })
}

/// Checks `f_n(x_{n+1}) = x_n` at every step.
pub fn check_path(tower: &Tower, path: &VertexPath) -> Result<()> {
    for n in 1..path.depth() {
        let below = id_of(path.at(n), n)?;
        let image = tower.project(n + 1, path.at(n + 1))?;
        if image != below {
            return Err(Error::InvalidVertex {
                code: tower.label(n + 1, path.at(n + 1))?,
                reason: format!("projects to {image}, not to x_{n} = {below}"),
            });
        }
    }
    Ok(())
}

/// The induced ball of radius `r` around `x_n`.
#[derive(Debug, Clone, Serialize)]
pub struct BallReport {
    pub level: usize,
    pub radius: usize,
    /// Vertex labels in discovery order; the root comes first.
    pub labels: Vec<String>,
    pub distances: Vec<usize>,
    pub v0_flags: Vec<bool>,
    /// Index pairs into `labels`, each with `i < j`.
    pub edges: Vec<(usize, usize)>,
    pub is_tree: bool,
    pub v0_hit: bool,
    #[serde(skip)]
    pub vertices: Vec<LevelVertex>,
    #[serde(skip)]
    parents: Vec<Option<usize>>,
}

impl BallReport {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// A cycle of the ball as a closed vertex sequence (first vertex not
    /// repeated), if the ball has one.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let (u, v) = *self
            .edges
            .iter()
            .find(|&&(u, v)| self.parents[u] != Some(v) && self.parents[v] != Some(u))?;
        let ancestors = |mut x: usize| {
            let mut out = vec![x];
            while let Some(p) = self.parents[x] {
                out.push(p);
                x = p;
            }
            out
        };
        let (pu, pv) = (ancestors(u), ancestors(v));
        let lca = *pu.iter().find(|x| pv.contains(x))?;
        let mut cycle: Vec<usize> = pu.iter().copied().take_while(|&x| x != lca).collect();
        cycle.push(lca);
        cycle.extend(pv.iter().copied().take_while(|&x| x != lca).collect::<Vec<_>>().into_iter().rev());
        Some(cycle)
    }
}

pub fn ball(tower: &Tower, path: &VertexPath, n: usize, r: usize) -> Result<BallReport> {
    if n == 0 || n > path.depth() {
        return Err(Error::LevelUnavailable {
            level: n,
            reason: format!("the path covers levels 1..={}", path.depth()),
        });
    }
    let root = path.at(n).clone();
    let mut index: HashMap<LevelVertex, usize> = HashMap::new();
    let mut vertices = vec![root.clone()];
    let mut distances = vec![0usize];
    let mut parents = vec![None];
    let mut adjacency: Vec<Vec<LevelVertex>> = Vec::new();
    index.insert(root, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let nbrs = tower.neighbors(n, &vertices[i])?;
        if distances[i] < r {
            for y in &nbrs {
                if !index.contains_key(y) {
                    index.insert(y.clone(), vertices.len());
                    vertices.push(y.clone());
                    distances.push(distances[i] + 1);
                    parents.push(Some(i));
                    queue.push_back(vertices.len() - 1);
                }
            }
        }
        if adjacency.len() <= i {
            adjacency.resize(i + 1, Vec::new());
        }
        adjacency[i] = nbrs;
    }
    let mut edges = Vec::new();
    for (i, nbrs) in adjacency.iter().enumerate() {
        for y in nbrs {
            if let Some(&j) = index.get(y) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    let v0_flags = vertices
        .iter()
        .map(|v| tower.is_v0(n, v))
        .collect::<Result<Vec<_>>>()?;
    let labels = vertices
        .iter()
        .map(|v| tower.label(n, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(BallReport {
        level: n,
        radius: r,
        is_tree: edges.len() + 1 == vertices.len(),
        v0_hit: v0_flags.iter().any(|&f| f),
        labels,
        distances,
        v0_flags,
        edges,
        vertices,
        parents,
    })
}

/// How far up the path the edge `(x_n, neighbor)` keeps lifting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborPersistence {
    pub neighbor: LevelVertex,
    /// Deepest level reached; `n` itself if the edge does not lift at all.
    pub depth: usize,
}

/// Lifts of every edge at `x_n` along the path, level by level. An edge
/// lifts at level `k` when `x_k` is a `V1` vertex and the edge rule keeps
/// every profile coordinate in range.
pub fn neighbor_persistence(tower: &Tower, path: &VertexPath, n: usize) -> Result<Vec<NeighborPersistence>> {
    let mut out = Vec::new();
    for y in tower.neighbors(n, path.at(n))? {
        let mut current = y.clone();
        let mut depth = n;
        for k in n + 1..=path.depth() {
            let params = params_at(tower, k)?;
            let ExpandedVertex::V1 { slot, base, profile } = tower.expanded(k, path.at(k))? else {
                break;
            };
            let to = id_of(&current, k - 1)?;
            let Some(edge) = params.base().edge_index(base, to) else {
                return Err(Error::NotAnEdge(format!("({base}, {to}) at level {}", k - 1)));
            };
            let Some(q) = params.lift_profile(base, to, edge, &profile) else {
                break;
            };
            current = tower.from_expanded(
                k,
                ExpandedVertex::V1 {
                    slot,
                    base: to,
                    profile: q,
                },
            )?;
            depth = k;
        }
        out.push(NeighborPersistence { neighbor: y, depth });
    }
    Ok(out)
}

/// The neighbors of `x_n` whose edge lifts through every level of the path.
pub fn persistent_neighbors(tower: &Tower, path: &VertexPath, n: usize) -> Result<Vec<LevelVertex>> {
    Ok(neighbor_persistence(tower, path, n)?
        .into_iter()
        .filter(|p| p.depth == path.depth())
        .map(|p| p.neighbor)
        .collect())
}

/// Aggregate ball statistics at one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeStatsRow {
    pub level: usize,
    pub radius: usize,
    pub samples: usize,
    pub trees: usize,
    pub v0_hits: usize,
    pub persistent_degree_total: usize,
    pub seed: u64,
}

impl TreeStatsRow {
    pub const CSV_HEADER: &'static str =
        "level,radius,samples,tree_fraction,v0_hit_fraction,mean_persistent_degree,seed";

    pub fn tree_fraction(&self) -> f64 {
        self.trees as f64 / self.samples as f64
    }

    pub fn v0_hit_fraction(&self) -> f64 {
        self.v0_hits as f64 / self.samples as f64
    }

    pub fn mean_persistent_degree(&self) -> f64 {
        self.persistent_degree_total as f64 / self.samples as f64
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{}",
            self.level,
            self.radius,
            self.samples,
            self.tree_fraction(),
            self.v0_hit_fraction(),
            self.mean_persistent_degree(),
            self.seed
        )
    }
}

/// The RNG of sample `i` under `seed`: one ChaCha stream per sample.
pub fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// One row per requested level. Sample `i` draws a path to the deepest
/// representable level from [`sample_rng`]`(seed, i)` and is inspected at
/// every requested level, so rows of one call share their roots.
pub fn tree_stats(tower: &Tower, levels: &[usize], r: usize, samples: usize, seed: u64) -> Result<Vec<TreeStatsRow>> {
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let depth = tower.representable_depth();
    if let Some(&bad) = levels.iter().find(|&&n| n == 0 || n > depth) {
        return Err(Error::LevelUnavailable {
            level: bad,
            reason: format!("statistics reach at most level {depth}"),
        });
    }
    let mut rows: Vec<TreeStatsRow> = levels
        .iter()
        .map(|&level| TreeStatsRow {
            level,
            radius: r,
            samples,
            trees: 0,
            v0_hits: 0,
            persistent_degree_total: 0,
            seed,
        })
        .collect();
    for i in 0..samples {
        let path = sample_path(tower, depth, &mut sample_rng(seed, i))?;
        for row in &mut rows {
            let b = ball(tower, &path, row.level, r)?;
            row.trees += b.is_tree as usize;
            row.v0_hits += b.v0_hit as usize;
            row.persistent_degree_total += persistent_neighbors(tower, &path, row.level)?.len();
        }
    }
    Ok(rows)
}

pub fn tree_stats_csv(rows: &[TreeStatsRow]) -> String {
    let mut out = String::from(TreeStatsRow::CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Result of walking a base cycle in an expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleLift {
    /// The walk returned to its start: the cycle lifts intact.
    Closed,
    /// The walk completed but ended at a different vertex of the fiber.
    Open { end: ExpandedVertex },
    /// Some coordinate left `1..=N` on step `step`.
    Exited { step: usize },
}

/// Net displacement of each profile coordinate around the closed walk
/// `cycle[0], cycle[1], …, cycle[0]` of the base graph.
pub fn cycle_winding(params: &ExpansionParams, cycle: &[usize]) -> Result<Vec<i64>> {
    let base = params.base();
    let mut winding = vec![0i64; params.k()];
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        let Some(e) = base.edge_index(a, b) else {
            return Err(Error::NotAnEdge(format!("({a}, {b}) in the cycle")));
        };
        for (s, w) in winding.iter_mut().enumerate() {
            let o = params.orientation(s);
            let toward_b = o.arc(base, e) == (a, b);
            *w += if toward_b { 1 } else { -1 };
        }
    }
    Ok(winding)
}

/// Walks the lift of `cycle` from `start`, a `V1` vertex over `cycle[0]`.
pub fn lift_cycle(params: &ExpansionParams, cycle: &[usize], start: &ExpandedVertex) -> Result<CycleLift> {
    let ExpandedVertex::V1 { slot, base, profile } = start else {
        return Err(Error::InvalidVertex {
            code: start.to_string(),
            reason: "cycle lifts start at a V1 vertex".into(),
        });
    };
    params.validate(start)?;
    if cycle.first() != Some(base) {
        return Err(Error::InvalidVertex {
            code: start.to_string(),
            reason: "start does not lie over the first cycle vertex".into(),
        });
    }
    let mut profile = profile.clone();
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        let Some(e) = params.base().edge_index(a, b) else {
            return Err(Error::NotAnEdge(format!("({a}, {b}) in the cycle")));
        };
        match params.lift_profile(a, b, e, &profile) {
            Some(q) => profile = q,
            None => return Ok(CycleLift::Exited { step: i }),
        }
    }
    let end = ExpandedVertex::V1 {
        slot: *slot,
        base: *base,
        profile,
    };
    Ok(if &end == start {
        CycleLift::Closed
    } else {
        CycleLift::Open { end }
    })
}

/// Lifts of one cycle from every `V1` vertex over its first vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleLiftReport {
    pub cycle_length: usize,
    pub winding: Vec<i64>,
    pub closed: usize,
    pub open: usize,
    pub exited: usize,
    /// A nonzero winding forbids closed lifts; a zero winding forbids open
    /// ones.
    pub consistent: bool,
}

/// Checks every lift of a cycle found in the level-`n` ball of radius `r`.
/// Level `n + 1` must be materialized. Returns `None` for an acyclic ball.
pub fn ball_cycle_lifts(tower: &Tower, path: &VertexPath, n: usize, r: usize) -> Result<Option<CycleLiftReport>> {
    let b = ball(tower, path, n, r)?;
    let Some(cycle) = b.find_cycle() else {
        return Ok(None);
    };
    let ids = cycle
        .iter()
        .map(|&i| id_of(&b.vertices[i], n))
        .collect::<Result<Vec<_>>>()?;
    let upper = tower.level(n + 1)?;
    let m = upper.materialized().ok_or_else(|| Error::LevelUnavailable {
        level: n + 1,
        reason: "cycle lifts are enumerated on explicit levels".into(),
    })?;
    let params = m.params();
    let winding = cycle_winding(params, &ids)?;
    let (mut closed, mut open, mut exited) = (0, 0, 0);
    for id in m.fiber(ids[0]) {
        let x = m.code(id);
        if x.is_v0() {
            continue;
        }
        match lift_cycle(params, &ids, &x)? {
            CycleLift::Closed => closed += 1,
            CycleLift::Open { .. } => open += 1,
            CycleLift::Exited { .. } => exited += 1,
        }
    }
    let zero = winding.iter().all(|&w| w == 0);
    Ok(Some(CycleLiftReport {
        cycle_length: ids.len(),
        consistent: if zero { open == 0 } else { closed == 0 },
        winding,
        closed,
        open,
        exited,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::tests::desk;
    use crate::tower::{BuildOptions, Schedule};

    #[test]
    fn paths_are_compatible_and_deterministic() {
        let t = desk(3);
        for i in 0..200 {
            let p = sample_path(&t, 3, &mut sample_rng(11, i)).unwrap();
            check_path(&t, &p).unwrap();
            assert_eq!(p, sample_path(&t, 3, &mut sample_rng(11, i)).unwrap());
        }
        assert!(sample_path(&t, 4, &mut sample_rng(0, 0)).is_err());
    }

    #[test]
    fn broken_path_is_rejected() {
        let t = desk(2);
        let mut p = sample_path(&t, 2, &mut sample_rng(0, 0)).unwrap();
        let LevelVertex::Id(x1) = p.vertices[0] else { unreachable!() };
        p.vertices[0] = LevelVertex::Id((x1 + 1) % 4);
        assert!(check_path(&t, &p).is_err());
    }

    #[test]
    fn level_one_marginal_is_uniform() {
        let t = desk(1);
        let draws = 100_000;
        let mut hist = [0usize; 4];
        for i in 0..draws {
            let p = sample_path(&t, 1, &mut sample_rng(2, i)).unwrap();
            hist[id_of(p.at(1), 1).unwrap()] += 1;
        }
        let e = draws as f64 / 4.0;
        let chi2: f64 = hist.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // df = 3: mean 3, sd sqrt(6).
        assert!(chi2 < 3.0 + 4.0 * 6f64.sqrt(), "{chi2}");
    }

    #[test]
    fn small_balls() {
        let t = desk(2);
        let p = sample_path(&t, 2, &mut sample_rng(1, 0)).unwrap();
        let b0 = ball(&t, &p, 2, 0).unwrap();
        assert_eq!((b0.vertex_count(), b0.is_tree), (1, true));
        for n in 1..=2 {
            let b1 = ball(&t, &p, n, 1).unwrap();
            assert_eq!(b1.vertex_count(), 3);
            assert!(b1.is_tree);
        }
        let b2 = ball(&t, &p, 1, 2).unwrap();
        assert_eq!(b2.vertex_count(), 4);
        assert_eq!(b2.edges.len(), 4);
        assert!(!b2.is_tree);
        let c = b2.find_cycle().unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn ball_matches_materialized_adjacency() {
        let t = desk(3);
        let p = sample_path(&t, 3, &mut sample_rng(4, 0)).unwrap();
        let g = t.level(3).unwrap().graph().unwrap();
        let b = ball(&t, &p, 3, 3).unwrap();
        let ids: Vec<usize> = b.vertices.iter().map(|v| id_of(v, 3).unwrap()).collect();
        let mut count = 0;
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                count += g.has_edge(ids[i], ids[j]) as usize;
            }
        }
        assert_eq!(count, b.edges.len());
        for (i, &d) in b.distances.iter().enumerate() {
            assert!(d <= 3);
            if i > 0 {
                assert!(d >= 1);
            }
        }
    }

    #[test]
    fn implicit_level_balls_use_the_oracle() {
        let t = Tower::build(2, Schedule::Paper, 2, BuildOptions::default()).unwrap();
        let p = sample_path(&t, 2, &mut sample_rng(0, 3)).unwrap();
        assert!(matches!(p.at(2), LevelVertex::Coded(_)));
        check_path(&t, &p).unwrap();
        let b = ball(&t, &p, 2, 2).unwrap();
        assert!(b.vertex_count() <= 1 + 2 + 2);
    }

    #[test]
    fn full_degree_v1_keeps_every_neighbor() {
        let t = desk(2);
        let m = t.level(2).unwrap().materialized().unwrap();
        let mut seen = 0;
        for id in 0..m.vertex_count() {
            let x = m.code(id);
            if x.is_v0() || m.params().v1_degree(x.base(), x.profile()) != 2 {
                continue;
            }
            let path = VertexPath {
                vertices: vec![LevelVertex::Id(x.base()), LevelVertex::Id(id)],
            };
            assert_eq!(persistent_neighbors(&t, &path, 1).unwrap().len(), 2);
            seen += 1;
        }
        assert!(seen > 0);
    }

    #[test]
    fn persistence_follows_the_edge_rule() {
        // One level up, an edge persists exactly when its lift stays in
        // range, so the persistent degree is the V1-degree of the tuple.
        let t = desk(2);
        let m = t.level(2).unwrap().materialized().unwrap();
        let p = m.params();
        let mut exits_at_three = 0;
        for id in 0..m.vertex_count() {
            let x = m.code(id);
            if x.is_v0() {
                continue;
            }
            let path = VertexPath {
                vertices: vec![LevelVertex::Id(x.base()), LevelVertex::Id(id)],
            };
            let k = p.v1_degree(x.base(), x.profile());
            assert_eq!(persistent_neighbors(&t, &path, 1).unwrap().len(), k);
            if x.profile() == [3] && k < 2 {
                exits_at_three += 1;
                let pers = neighbor_persistence(&t, &path, 1).unwrap();
                assert!(pers.iter().any(|q| q.depth == 1));
            }
        }
        assert!(exits_at_three > 0);
    }

    #[test]
    fn persistence_is_monotone_in_depth() {
        let t = desk(3);
        for i in 0..300 {
            let p = sample_path(&t, 3, &mut sample_rng(8, i)).unwrap();
            let short = VertexPath {
                vertices: p.vertices[..2].to_vec(),
            };
            let deep = persistent_neighbors(&t, &p, 1).unwrap();
            let shallow = persistent_neighbors(&t, &short, 1).unwrap();
            assert!(deep.iter().all(|y| shallow.contains(y)));
        }
    }

    #[test]
    fn tree_stats_are_deterministic_and_level_one_has_no_trees() {
        let t = desk(3);
        let rows = tree_stats(&t, &[1, 2, 3], 2, 300, 7).unwrap();
        assert_eq!(rows, tree_stats(&t, &[1, 2, 3], 2, 300, 7).unwrap());
        assert_eq!(rows[0].trees, 0);
        assert_eq!(rows[0].v0_hits, 0);
        let csv = tree_stats_csv(&rows);
        assert!(csv.starts_with(TreeStatsRow::CSV_HEADER));
        assert_eq!(csv.lines().count(), 4);
        assert!(tree_stats(&t, &[4], 2, 10, 7).is_err());
    }

    #[test]
    fn winding_decides_cycle_lifts() {
        let t = desk(3);
        let mut checked = 0;
        for n in 1..=2 {
            for i in 0..100 {
                let p = sample_path(&t, 3, &mut sample_rng(5, i)).unwrap();
                if let Some(r) = ball_cycle_lifts(&t, &p, n, 3).unwrap() {
                    assert!(r.consistent, "{r:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn four_cycle_winding_on_k22() {
        use crate::expansion::SubsetSpec;
        use crate::graph::{make_complete_bipartite, Orientation};

        let g = make_complete_bipartite(2).unwrap();
        let cycle = [0, 2, 1, 3];
        // Canonical edges: (0,2), (0,3), (1,2), (1,3). Reversing (0,3) and
        // (1,2) gives the directed cycle 0 → 2 → 1 → 3 → 0.
        let directed = Orientation::from_bits(vec![false, true, true, false]).index();
        let p = ExpansionParams::new(
            g,
            3,
            SubsetSpec::Indices(vec![0u32.into(), directed]),
        )
        .unwrap();
        assert_eq!(cycle_winding(&p, &cycle).unwrap(), vec![0, 4]);
        for q in 1..=3 {
            let start = ExpandedVertex::V1 {
                slot: 1,
                base: 0,
                profile: vec![1, q],
            };
            assert!(matches!(
                lift_cycle(&p, &cycle, &start).unwrap(),
                CycleLift::Exited { .. }
            ));
        }
        let single = ExpansionParams::new(
            make_complete_bipartite(2).unwrap(),
            3,
            SubsetSpec::Indices(vec![0u32.into()]),
        )
        .unwrap();
        let start = ExpandedVertex::V1 {
            slot: 2,
            base: 0,
            profile: vec![1],
        };
        assert_eq!(lift_cycle(&single, &cycle, &start).unwrap(), CycleLift::Closed);
        assert!(cycle_winding(&p, &[0, 1]).is_err());
        assert!(lift_cycle(&single, &[2, 0, 3, 1], &start).is_err());
    }
}
