//! Exhaustive checks of a materialized expansion.

use std::collections::VecDeque;

use num_bigint::BigUint;
use serde::Serialize;

use super::Materialized;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn pass(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            detail: detail.into(),
            witness: None,
        }
    }

    fn fail(name: &str, detail: impl Into<String>, witness: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: false,
            detail: detail.into(),
            witness: Some(witness.into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs every structural check on `m`.
pub fn verify_materialized(m: &Materialized) -> VerificationReport {
    let checks = vec![
        check_counts(m),
        check_regular(m),
        check_oracle_agreement(m),
        check_bipartite(m),
        check_homomorphism(m),
        check_padding_projection(m),
        check_fibers(m),
        check_potentials(m),
        check_padding_bound(m),
        check_aligned_acyclicity(m),
    ];
    VerificationReport { checks }
}

fn check_counts(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "counts_match_enumeration";
    let c = m.counts();
    let found = (
        BigUint::from(m.v1_count()),
        BigUint::from(m.v0_count()),
        BigUint::from(m.vertex_count()),
    );
    if found == (c.v1_count.clone(), c.v0_count.clone(), c.total_count.clone()) {
        CheckOutcome::pass(
            NAME,
            format!(
                "v1 = {}, v0 = {}, total = {}",
                c.v1_count, c.v0_count, c.total_count
            ),
        )
    } else {
        CheckOutcome::fail(
            NAME,
            "enumerated counts differ from the closed form",
            format!(
                "enumerated (v1, v0, total) = ({}, {}, {}); formula ({}, {}, {})",
                found.0, found.1, found.2, c.v1_count, c.v0_count, c.total_count
            ),
        )
    }
}

fn check_regular(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "regular";
    let d = m.params().degree();
    match (0..m.vertex_count()).find(|&x| m.graph().degree(x) != d) {
        None => CheckOutcome::pass(NAME, format!("every vertex has degree {d}")),
        Some(x) => CheckOutcome::fail(
            NAME,
            format!("vertex has degree {} instead of {d}", m.graph().degree(x)),
            m.code(x).to_string(),
        ),
    }
}

/// The implicit neighbor oracle and the enumerated adjacency agree, which
/// also certifies oracle symmetry and simplicity (the graph is stored
/// without loops or parallel edges).
fn check_oracle_agreement(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "oracle_agreement";
    let p = m.params();
    for x in 0..m.vertex_count() {
        let code = m.code(x);
        let mut expected = match p.neighbors(&code) {
            Ok(nbrs) => match nbrs.iter().map(|y| m.index_of(y)).collect::<Option<Vec<_>>>() {
                Some(ids) => ids,
                None => {
                    return CheckOutcome::fail(NAME, "oracle produced an unknown code", code.to_string())
                }
            },
            Err(e) => return CheckOutcome::fail(NAME, e.to_string(), code.to_string()),
        };
        expected.sort_unstable();
        let found: Vec<usize> = m.graph().neighbors(x).iter().map(|&(w, _)| w).collect();
        if expected != found {
            return CheckOutcome::fail(
                NAME,
                "enumerated neighbors differ from the oracle",
                code.to_string(),
            );
        }
    }
    CheckOutcome::pass(NAME, "oracle neighbors match the enumerated graph at every vertex")
}

fn check_bipartite(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "bipartite";
    let g = m.graph();
    let Some(sides) = g.bipartition() else {
        return CheckOutcome::fail(NAME, "no side labels constructed", "base graph has no bipartition");
    };
    if let Some(&(u, v)) = g.edges().iter().find(|&&(u, v)| sides[u] == sides[v]) {
        return CheckOutcome::fail(
            NAME,
            "edge inside one side",
            format!("{} -- {}", m.code(u), m.code(v)),
        );
    }
    // Independent 2-coloring search, ignoring the labels.
    if let Some((u, v)) = g.find_odd_cycle_edge() {
        return CheckOutcome::fail(
            NAME,
            "odd cycle found",
            format!("{} -- {}", m.code(u), m.code(v)),
        );
    }
    CheckOutcome::pass(NAME, "side labels cross every edge; no odd cycle")
}

fn check_homomorphism(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "v1_homomorphism";
    let base = m.params().base();
    for &(x, y) in m.graph().edges() {
        if !m.is_v0(x) && !m.is_v0(y) && !base.has_edge(m.project(x), m.project(y)) {
            return CheckOutcome::fail(
                NAME,
                "V1 edge projects to a non-edge",
                format!("{} -- {}", m.code(x), m.code(y)),
            );
        }
    }
    CheckOutcome::pass(NAME, "every V1-V1 edge projects to a base edge")
}

fn check_padding_projection(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "v0_edges_project_to_a_point";
    for &(x, y) in m.graph().edges() {
        if (m.is_v0(x) || m.is_v0(y)) && m.project(x) != m.project(y) {
            return CheckOutcome::fail(
                NAME,
                "padding edge joins different fibers",
                format!("{} -- {}", m.code(x), m.code(y)),
            );
        }
    }
    CheckOutcome::pass(NAME, "both endpoints of every padding edge share a projection")
}

fn check_fibers(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "equal_fibers";
    let base_count = m.params().base().vertex_count();
    let projection: Vec<usize> = (0..m.vertex_count()).map(|x| m.project(x)).collect();
    let sizes = fiber_sizes(&projection, base_count);
    let expected = &m.counts().fiber_size;
    match sizes.iter().position(|&s| BigUint::from(s) != *expected) {
        None => CheckOutcome::pass(NAME, format!("all {base_count} fibers have size {expected}")),
        Some(a) => CheckOutcome::fail(
            NAME,
            format!("fiber of base vertex {a} has size {} instead of {expected}", sizes[a]),
            a.to_string(),
        ),
    }
}

/// Fiber sizes of an arbitrary map onto `0..base_count`.
pub(crate) fn fiber_sizes(projection: &[usize], base_count: usize) -> Vec<usize> {
    let mut sizes = vec![0usize; base_count];
    for &a in projection {
        sizes[a] += 1;
    }
    sizes
}

fn check_potentials(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "potential_steps";
    let p = m.params();
    let base = p.base();
    for s in 0..p.k() {
        let o = p.orientation(s);
        for &(x, y) in m.graph().edges() {
            let (gx, gy) = (m.potential(s, x) as i64, m.potential(s, y) as i64);
            let ok = if m.is_v0(x) || m.is_v0(y) {
                gx == gy
            } else {
                let Some(e) = base.edge_index(m.project(x), m.project(y)) else {
                    return CheckOutcome::fail(
                        NAME,
                        "V1 edge has no base edge to orient",
                        format!("{} -- {}", m.code(x), m.code(y)),
                    );
                };
                let (tail, _) = o.arc(base, e);
                if tail == m.project(x) {
                    gy == gx + 1
                } else {
                    gx == gy + 1
                }
            };
            if !ok {
                return CheckOutcome::fail(
                    NAME,
                    format!("orientation position {s}: values {gx} -> {gy}"),
                    format!("{} -- {}", m.code(x), m.code(y)),
                );
            }
        }
    }
    CheckOutcome::pass(
        NAME,
        format!(
            "for all {} orientations: +1 along every lifted edge, constant across padding edges",
            p.k()
        ),
    )
}

fn check_padding_bound(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "padding_bound";
    let p = m.params();
    let n = BigUint::from(p.n());
    let v0 = BigUint::from(m.v0_count());
    let v1 = BigUint::from(m.v1_count());
    let detail = format!("|V0| = {v0}, (2K/N)|V1| = {}/{}", BigUint::from(2 * p.k()) * &v1, n);
    if &v0 * &n < BigUint::from(2 * p.k()) * &v1 {
        CheckOutcome::pass(NAME, detail)
    } else {
        CheckOutcome::fail(NAME, "padding exceeds the bound", detail)
    }
}

/// For each orientation position, the lift of `S[s]` to `V1-V1` edges has
/// no directed cycle. Decided by Kahn's algorithm from the orientation
/// alone, independently of the potentials.
fn check_aligned_acyclicity(m: &Materialized) -> CheckOutcome {
    const NAME: &str = "aligned_acyclicity";
    let p = m.params();
    let base = p.base();
    let v1 = m.v1_count();
    for s in 0..p.k() {
        let o = p.orientation(s);
        let mut indegree = vec![0usize; v1];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); v1];
        for &(x, y) in m.graph().edges() {
            if x >= v1 || y >= v1 {
                continue;
            }
            let Some(e) = base.edge_index(m.project(x), m.project(y)) else {
                return CheckOutcome::fail(
                    NAME,
                    "V1 edge has no base edge to orient",
                    format!("{} -- {}", m.code(x), m.code(y)),
                );
            };
            let (tail, _) = o.arc(base, e);
            let (from, to) = if tail == m.project(x) { (x, y) } else { (y, x) };
            out[from].push(to);
            indegree[to] += 1;
        }
        let mut queue: VecDeque<usize> = (0..v1).filter(|&x| indegree[x] == 0).collect();
        let mut removed = 0usize;
        while let Some(x) = queue.pop_front() {
            removed += 1;
            for &y in &out[x] {
                indegree[y] -= 1;
                if indegree[y] == 0 {
                    queue.push_back(y);
                }
            }
        }
        if removed != v1 {
            let stuck = (0..v1).find(|&x| indegree[x] > 0).unwrap_or(0);
            return CheckOutcome::fail(
                NAME,
                format!("orientation position {s} lifts to a directed cycle"),
                m.code(stuck).to_string(),
            );
        }
    }
    CheckOutcome::pass(NAME, format!("all {} lifted orientations are acyclic on V1", p.k()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::tests::toy;

    #[test]
    fn toy_passes_everything() {
        let m = Materialized::build(&toy(), 1 << 22).unwrap();
        let report = verify_materialized(&m);
        assert!(report.all_passed(), "{report:#?}");
        assert_eq!(report.checks.len(), 10);
    }

    #[test]
    fn removed_edge_is_caught_with_the_deficient_code() {
        let m = Materialized::build(&toy(), 1 << 22).unwrap();
        let (u, _) = m.graph().edge(0);
        let broken = m.without_edge(0).unwrap();
        let report = verify_materialized(&broken);
        let regular = report.get("regular").unwrap();
        assert!(!regular.passed);
        assert_eq!(regular.witness.as_deref(), Some(m.code(u).to_string().as_str()));
        assert!(!report.get("oracle_agreement").unwrap().passed);
    }

    #[test]
    fn skewed_map_has_unequal_fibers() {
        assert_eq!(fiber_sizes(&[0, 0, 1, 2, 2, 2], 3), vec![2, 1, 3]);
    }
}
