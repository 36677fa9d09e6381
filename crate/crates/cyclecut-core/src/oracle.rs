//! Brute-force minimum cycle decomposition for small even multigraphs,
//! and an exhaustive enumerator of small degree-{2,4} multigraphs.
//!
//! The solver is the independent ground truth the reduction engine is
//! tested against: it picks the lowest-id uncovered edge, enumerates
//! every simple cycle through it, recurses on the remainder and
//! memoizes on the uncovered-edge bitset.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::construct::CycleDecomposition;
use crate::graph::{EdgeId, Multigraph, NodeId};

pub const DEFAULT_MAX_EDGES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    TooManyEdges { edges: usize, max_edges: usize },
    OddDegree { node: NodeId, degree: u32 },
    IsolatedNode { node: NodeId },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooManyEdges { edges, max_edges } => {
                write!(f, "{edges} edges exceeds max-edges {max_edges}")
            }
            OracleError::OddDegree { node, degree } => {
                write!(f, "odd degree {degree} at node {node}")
            }
            OracleError::IsolatedNode { node } => write!(f, "isolated node {node}"),
        }
    }
}

/// Exact minimum with a witness decomposition.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub c_min: usize,
    pub witness: CycleDecomposition,
}

/// Exhaustive minimum cycle decomposition. Handles disconnected inputs
/// per component and sums the minima.
pub fn brute_force_c(g: &Multigraph, max_edges: usize) -> Result<OracleResult, OracleError> {
    if g.edge_count() > max_edges {
        return Err(OracleError::TooManyEdges { edges: g.edge_count(), max_edges });
    }
    for v in g.nodes() {
        if g.degree(v) % 2 != 0 {
            return Err(OracleError::OddDegree { node: v, degree: g.degree(v) });
        }
    }
    let mut c_min = 0;
    let mut cycles = Vec::new();
    for (comp, node_map, edge_map) in g.connected_components() {
        if comp.edge_count() == 0 {
            return Err(OracleError::IsolatedNode { node: node_map[0] });
        }
        let mut solver = Solver::new(&comp);
        let full = (1u32 << comp.edge_count()) - 1;
        let best = solver.solve(full);
        c_min += best as usize;
        // rebuild the witness from the memoized first-cycle choices
        let mut mask = full;
        while mask != 0 {
            let cycle = solver.choice[&mask].clone();
            let mut used = 0u32;
            let lifted: Vec<(EdgeId, NodeId, NodeId)> = cycle
                .iter()
                .map(|&(e, a, b)| {
                    used |= 1 << e.index();
                    (edge_map[e.index()], node_map[a.index()], node_map[b.index()])
                })
                .collect();
            cycles.push(lifted);
            mask &= !used;
        }
    }
    Ok(OracleResult { c_min, witness: CycleDecomposition { cycles } })
}

struct Solver<'a> {
    g: &'a Multigraph,
    memo: BTreeMap<u32, u32>,
    choice: BTreeMap<u32, Vec<(EdgeId, NodeId, NodeId)>>,
}

impl<'a> Solver<'a> {
    fn new(g: &'a Multigraph) -> Self {
        Solver { g, memo: BTreeMap::new(), choice: BTreeMap::new() }
    }

    fn solve(&mut self, mask: u32) -> u32 {
        if mask == 0 {
            return 0;
        }
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let e = EdgeId(mask.trailing_zeros());
        let mut best = u32::MAX;
        let mut best_cycle = Vec::new();
        for cycle in self.cycles_through(mask, e) {
            let mut used = 0u32;
            for &(f, _, _) in &cycle {
                used |= 1 << f.index();
            }
            let rest = self.solve(mask & !used);
            if rest != u32::MAX && rest + 1 < best {
                best = rest + 1;
                best_cycle = cycle;
            }
        }
        // every even graph decomposes, so some cycle always fits
        debug_assert_ne!(best, u32::MAX);
        self.memo.insert(mask, best);
        self.choice.insert(mask, best_cycle);
        best
    }

    /// All simple cycles through `e` using only edges in `mask`. A loop
    /// is the unique length-1 cycle at its node.
    fn cycles_through(&self, mask: u32, e: EdgeId) -> Vec<Vec<(EdgeId, NodeId, NodeId)>> {
        let (u, v) = self.g.endpoints(e);
        if u == v {
            return vec![vec![(e, u, u)]];
        }
        // walk from v back to u without repeating nodes
        let mut out = Vec::new();
        let mut path: Vec<(EdgeId, NodeId, NodeId)> = vec![(e, u, v)];
        let mut on_path = vec![false; self.g.node_count()];
        on_path[u.index()] = true;
        on_path[v.index()] = true;
        self.extend(mask, u, v, &mut path, &mut on_path, &mut out);
        out
    }

    fn extend(
        &self,
        mask: u32,
        target: NodeId,
        at: NodeId,
        path: &mut Vec<(EdgeId, NodeId, NodeId)>,
        on_path: &mut Vec<bool>,
        out: &mut Vec<Vec<(EdgeId, NodeId, NodeId)>>,
    ) {
        for &(y, f) in self.g.incident(at) {
            if mask & (1 << f.index()) == 0 || path.iter().any(|&(pf, _, _)| pf == f) {
                continue;
            }
            if y == at {
                continue; // loops cannot sit inside a longer simple cycle
            }
            if y == target {
                let mut cycle = path.clone();
                cycle.push((f, at, y));
                out.push(cycle);
                continue;
            }
            if on_path[y.index()] {
                continue;
            }
            path.push((f, at, y));
            on_path[y.index()] = true;
            self.extend(mask, target, y, path, on_path, out);
            on_path[y.index()] = false;
            path.pop();
        }
    }
}

/// Streams every labeled multigraph with `1..=max_nodes` nodes, at most
/// `max_edges` edges, loops and parallel edges allowed, and every node
/// degree in {2, 4}. Edge multiplicity per node pair is bounded by the
/// degree cap (4 for a non-loop pair, 2 for a loop).
pub fn for_each_even_multigraph<F: FnMut(&Multigraph)>(
    max_nodes: usize,
    max_edges: usize,
    mut f: F,
) {
    assert!(max_nodes <= 6 && max_edges <= 16, "enumeration bounds exceeded");
    for n in 1..=max_nodes {
        // slots (i, j) with i <= j, grouped by i so node i's degree is
        // final once its group is done
        let mut slots = Vec::new();
        for i in 0..n {
            for j in i..n {
                slots.push((i as u32, j as u32));
            }
        }
        let mut counts = vec![0u32; slots.len()];
        let mut degree = vec![0u32; n];
        descend(&slots, 0, max_edges, &mut counts, &mut degree, n, &mut f);
    }
}

fn descend<F: FnMut(&Multigraph)>(
    slots: &[(u32, u32)],
    idx: usize,
    budget: usize,
    counts: &mut Vec<u32>,
    degree: &mut Vec<u32>,
    n: usize,
    f: &mut F,
) {
    if idx == slots.len() {
        if degree.iter().all(|&d| d == 2 || d == 4) {
            let mut g = Multigraph::new(n);
            for (s, &c) in counts.iter().enumerate() {
                let (i, j) = slots[s];
                for _ in 0..c {
                    g.add_edge(NodeId(i), NodeId(j));
                }
            }
            f(&g);
        }
        return;
    }
    let (i, j) = slots[idx];
    let row_ends = idx + 1 == slots.len() || slots[idx + 1].0 != i;
    let per_edge = if i == j { 2 } else { 1 };
    let max_count = if i == j { 2 } else { 4 };
    for c in 0..=max_count {
        if c as usize > budget
            || degree[i as usize] + c * per_edge > 4
            || (i != j && degree[j as usize] + c > 4)
        {
            break;
        }
        counts[idx] = c;
        degree[i as usize] += c * per_edge;
        if i != j {
            degree[j as usize] += c;
        }
        let ok = !row_ends || matches!(degree[i as usize], 2 | 4);
        if ok {
            descend(slots, idx + 1, budget - c as usize, counts, degree, n, f);
        }
        degree[i as usize] -= c * per_edge;
        if i != j {
            degree[j as usize] -= c;
        }
        counts[idx] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::validate_decomposition;
    use crate::graph::parse_graph;

    fn c_min(text: &str) -> usize {
        let g = parse_graph(text).unwrap();
        let r = brute_force_c(&g, DEFAULT_MAX_EDGES).unwrap();
        validate_decomposition(&g, &r.witness).unwrap();
        assert_eq!(r.witness.cycles.len(), r.c_min);
        r.c_min
    }

    #[test]
    fn known_minima() {
        assert_eq!(c_min("2 4\n0 1\n0 1\n0 1\n0 1"), 2); // quadruple edge
        assert_eq!(c_min("6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0"), 1); // C6
        assert_eq!(c_min("5 6\n0 1\n1 2\n2 0\n0 3\n3 4\n4 0"), 2); // bowtie
        assert_eq!(c_min("3 6\n0 1\n0 1\n1 2\n1 2\n2 0\n2 0"), 2); // doubled triangle
        assert_eq!(c_min("1 2\n0 0\n0 0"), 2); // two loops
    }

    #[test]
    fn disconnected_inputs_sum() {
        assert_eq!(c_min("2 2\n0 0\n1 1"), 2);
    }

    #[test]
    fn error_paths() {
        let g = parse_graph("3 3\n0 1\n1 2\n2 0").unwrap();
        assert_eq!(
            brute_force_c(&g, 2).unwrap_err(),
            OracleError::TooManyEdges { edges: 3, max_edges: 2 }
        );
        let odd = parse_graph("2 1\n0 1").unwrap();
        assert!(matches!(brute_force_c(&odd, 16).unwrap_err(), OracleError::OddDegree { .. }));
        let iso = parse_graph("1 0").unwrap();
        assert!(matches!(brute_force_c(&iso, 16).unwrap_err(), OracleError::IsolatedNode { .. }));
    }

    #[test]
    fn enumerate_one_node() {
        let mut seen = Vec::new();
        for_each_even_multigraph(1, 2, |g| seen.push(g.edge_count()));
        seen.sort_unstable();
        assert_eq!(seen, [1, 2]); // one loop; two loops
    }

    #[test]
    fn enumerate_two_nodes_contains_expected_shapes() {
        let mut shapes = Vec::new();
        for_each_even_multigraph(2, 4, |g| {
            let loops = g.edge_ids().filter(|&e| g.is_loop(e)).count();
            shapes.push((g.node_count(), g.edge_count(), loops));
        });
        assert!(shapes.contains(&(2, 2, 0))); // 2-cycle
        assert!(shapes.contains(&(2, 4, 0))); // quadruple edge
        assert!(shapes.contains(&(2, 2, 2))); // loop at each node
        assert!(shapes.contains(&(2, 4, 2))); // 2-cycle plus a loop at each node
        // every emitted graph respects the degree filter
        for_each_even_multigraph(2, 4, |g| {
            for v in g.nodes() {
                assert!(matches!(g.degree(v), 2 | 4));
            }
        });
    }

    #[test]
    fn enumerate_three_nodes_contains_triangles() {
        let mut found_c3 = false;
        let mut found_doubled = false;
        for_each_even_multigraph(3, 6, |g| {
            if g.node_count() == 3 && g.edge_count() == 3 && g.nodes().all(|v| g.degree(v) == 2) {
                found_c3 = true;
            }
            if g.node_count() == 3 && g.edge_count() == 6 && g.nodes().all(|v| g.degree(v) == 4) {
                found_doubled = true;
            }
        });
        assert!(found_c3 && found_doubled);
    }

    #[test]
    fn oracle_subdivision_invariance_spot() {
        let g = parse_graph("3 6\n0 1\n0 1\n1 2\n1 2\n2 0\n2 0").unwrap();
        let base = brute_force_c(&g, 16).unwrap().c_min;
        for e in g.edge_ids() {
            let h = g.subdivide(e).unwrap();
            assert_eq!(brute_force_c(&h, 16).unwrap().c_min, base);
        }
    }
}
