//! Independent membership test: a graph is double ear decomposable
//! exactly when it is connected, every degree is 2 or 4, and its
//! treewidth is at most 2. The treewidth check reduces the graph with
//! the standard series-parallel rule set and succeeds when no edge
//! survives. This module shares no code with the reduction engine, so
//! the two can cross-validate each other.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Multigraph, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognitionReport {
    pub connected: bool,
    pub degrees_ok: bool,
    /// First node with degree outside {2, 4}, when any.
    pub bad_degree: Option<NodeId>,
    pub treewidth_le2: bool,
    pub verdict: bool,
}

/// Checks all degrees lie in {2, 4}; a loop counts 2. Returns the first
/// offending node as witness.
pub fn degrees_in_2_4(g: &Multigraph) -> (bool, Option<NodeId>) {
    for v in g.nodes() {
        if !matches!(g.degree(v), 2 | 4) {
            return (false, Some(v));
        }
    }
    (true, None)
}

/// True iff the graph reduces to edgeless under: delete a loop, merge
/// two parallel edges, delete a degree-(<=1) node, suppress a loopless
/// degree-2 node. These rules are confluent and eliminate exactly the
/// K4-minor-free (treewidth <= 2) graphs.
pub fn treewidth_at_most_2(g: &Multigraph) -> bool {
    let n = g.node_count();
    // parallel edges as counts; loops tracked separately per node
    let mut nbr: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); n];
    let mut loops = vec![0u32; n];
    let mut alive = vec![true; n];
    let mut remaining = 0usize;
    for e in g.edge_ids() {
        let (u, v) = g.endpoints(e);
        remaining += 1;
        if u == v {
            loops[u.index()] += 1;
        } else {
            *nbr[u.index()].entry(v.0).or_insert(0) += 1;
            *nbr[v.index()].entry(u.0).or_insert(0) += 1;
        }
    }

    let mut work: Vec<u32> = (0..n as u32).collect();
    while let Some(v) = work.pop() {
        let vi = v as usize;
        if !alive[vi] {
            continue;
        }
        if loops[vi] > 0 {
            remaining -= loops[vi] as usize;
            loops[vi] = 0;
        }
        let parallels: Vec<u32> =
            nbr[vi].iter().filter(|&(_, &c)| c > 1).map(|(&w, _)| w).collect();
        for w in parallels {
            let c = nbr[vi][&w];
            remaining -= (c - 1) as usize;
            nbr[vi].insert(w, 1);
            nbr[w as usize].insert(v, 1);
            work.push(w);
        }
        match nbr[vi].len() {
            0 => alive[vi] = false,
            1 => {
                let (&w, _) = nbr[vi].iter().next().unwrap();
                nbr[vi].clear();
                nbr[w as usize].remove(&v);
                remaining -= 1;
                alive[vi] = false;
                work.push(w);
            }
            2 => {
                let mut it = nbr[vi].iter();
                let (&a, _) = it.next().unwrap();
                let (&b, _) = it.next().unwrap();
                nbr[vi].clear();
                nbr[a as usize].remove(&v);
                nbr[b as usize].remove(&v);
                *nbr[a as usize].entry(b).or_insert(0) += 1;
                *nbr[b as usize].entry(a).or_insert(0) += 1;
                remaining -= 1;
                alive[vi] = false;
                work.push(a);
                work.push(b);
            }
            _ => {}
        }
    }
    remaining == 0
}

/// Full membership report; the verdict conjoins all three conditions.
pub fn is_double_ear_decomposable(g: &Multigraph) -> RecognitionReport {
    let connected = g.is_connected();
    let (degrees_ok, bad_degree) = degrees_in_2_4(g);
    let treewidth_le2 = treewidth_at_most_2(g);
    RecognitionReport {
        connected,
        degrees_ok,
        bad_degree,
        treewidth_le2,
        verdict: connected && degrees_ok && treewidth_le2,
    }
}
