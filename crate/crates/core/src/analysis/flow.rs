use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::graph::{Circulation, FiniteGraph, Orientation};
use crate::Rational;

/// An optimal circulation respecting an orientation, with unit capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedCirculation {
    /// `Σ_e f_e`, the number of arcs carrying flow.
    pub value: Rational,
    /// The optimum, as a circulation on the undirected graph.
    pub circulation: Circulation,
}

fn arcs(graph: &FiniteGraph, o: &Orientation, mask: Option<&[bool]>) -> Result<Vec<(usize, usize, usize)>> {
    o.check_graph(graph)?;
    if let Some(mask) = mask {
        if mask.len() != graph.edge_count() {
            return Err(Error::EdgeCountMismatch {
                expected: graph.edge_count(),
                found: mask.len(),
            });
        }
    }
    Ok((0..graph.edge_count())
        .filter(|&e| mask.is_none_or(|m| m[e]))
        .map(|e| {
            let (t, h) = o.arc(graph, e);
            (t, h, e)
        })
        .collect())
}

/// Is the `o`-directed graph (restricted to `mask`) free of directed
/// cycles? Kahn's algorithm.
pub fn is_acyclic(graph: &FiniteGraph, o: &Orientation, mask: Option<&[bool]>) -> Result<bool> {
    let arcs = arcs(graph, o, mask)?;
    let n = graph.vertex_count();
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(t, h, _) in &arcs {
        indeg[h] += 1;
        out[t].push(h);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = queue.pop_front() {
        removed += 1;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    Ok(removed == n)
}

/// Strongly connected component of every vertex (iterative Tarjan).
fn scc(n: usize, out: &[Vec<usize>]) -> Vec<usize> {
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![NONE; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < out[v].len() {
                let w = out[v][*i];
                *i += 1;
                if index[w] == NONE {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Residual network of one component for the min-cost circulation.
struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Self {
            head: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Adds `u → v` and its reverse; returns the forward residual index.
    fn add(&mut self, u: usize, v: usize, cap: i64, cost: i64) -> usize {
        let id = self.head.len();
        self.head.extend([v, u]);
        self.cap.extend([cap, 0]);
        self.cost.extend([cost, -cost]);
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }
}

/// Max `Σ f_e` over one strongly connected component: start with every arc
/// saturated, then cancel the imbalance along cheapest residual paths.
fn solve_component(n: usize, arcs: &[(usize, usize)]) -> Vec<bool> {
    let (source, sink) = (n, n + 1);
    let mut r = Residual::new(n + 2);
    let mut excess = vec![0i64; n];
    let mut arc_ids = Vec::with_capacity(arcs.len());
    for &(t, h) in arcs {
        // Saturated: only the undo direction (cost +1) has capacity.
        let id = r.add(t, h, 0, -1);
        r.cap[id + 1] = 1;
        excess[h] += 1;
        excess[t] -= 1;
        arc_ids.push(id);
    }
    let mut need = 0;
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            r.add(source, v, x, 0);
            need += x;
        } else if x < 0 {
            r.add(v, sink, -x, 0);
        }
    }
    let total = n + 2;
    let mut potential = vec![0i64; total];
    while need > 0 {
        let mut dist = vec![i64::MAX; total];
        let mut via = vec![usize::MAX; total];
        let mut heap = BinaryHeap::from([Reverse((0i64, source))]);
        dist[source] = 0;
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &id in &r.adj[u] {
                if r.cap[id] == 0 {
                    continue;
                }
                let v = r.head[id];
                let nd = d + r.cost[id] + potential[u] - potential[v];
                if nd < dist[v] {
                    dist[v] = nd;
                    via[v] = id;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        assert!(dist[sink] < i64::MAX, "zero flow is always feasible");
        // Unsettled vertices advance by the sink distance.
        for v in 0..total {
            potential[v] += dist[v].min(dist[sink]);
        }
        let mut push = need;
        let mut v = sink;
        while v != source {
            let id = via[v];
            push = push.min(r.cap[id]);
            v = r.head[id ^ 1];
        }
        let mut v = sink;
        while v != source {
            let id = via[v];
            r.cap[id] -= push;
            r.cap[id ^ 1] += push;
            v = r.head[id ^ 1];
        }
        need -= push;
    }
    // An arc carries flow when its undo capacity is still available.
    arc_ids.iter().map(|&id| r.cap[id + 1] == 1).collect()
}

/// The largest `Σ_e f_e` over circulations with `0 ≤ f_e ≤ 1` along the
/// `o`-direction of each edge (edges outside `mask` carry nothing).
///
/// The constraint matrix is totally unimodular, so an integral optimum
/// exists; the solver finds one exactly. Arcs between strongly connected
/// components carry no circulation and are dropped first.
pub fn max_aligned_circulation(
    graph: &FiniteGraph,
    o: &Orientation,
    mask: Option<&[bool]>,
) -> Result<AlignedCirculation> {
    let arcs = arcs(graph, o, mask)?;
    let n = graph.vertex_count();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(t, h, _) in &arcs {
        out[t].push(h);
    }
    let comp = scc(n, &out);
    let comp_count = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); comp_count];
    let mut local = vec![0usize; n];
    for v in 0..n {
        local[v] = members[comp[v]].len();
        members[comp[v]].push(v);
    }
    let mut inner: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); comp_count];
    for &(t, h, e) in &arcs {
        if comp[t] == comp[h] {
            inner[comp[t]].push((local[t], local[h], e));
        }
    }
    let mut values = vec![Rational::from_integer(BigInt::from(0)); graph.edge_count()];
    let mut total = 0i64;
    for (c, list) in inner.iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        let local_arcs: Vec<(usize, usize)> = list.iter().map(|&(t, h, _)| (t, h)).collect();
        let used = solve_component(members[c].len(), &local_arcs);
        for (&(_, _, e), &u) in list.iter().zip(&used) {
            if u {
                total += 1;
                let (lo, _) = graph.edge(e);
                let (tail, _) = o.arc(graph, e);
                let sign = if tail == lo { 1 } else { -1 };
                values[e] = Rational::from_integer(BigInt::from(sign));
            }
        }
    }
    Ok(AlignedCirculation {
        value: Rational::from_integer(BigInt::from(total)),
        circulation: Circulation::new(values),
    })
}
