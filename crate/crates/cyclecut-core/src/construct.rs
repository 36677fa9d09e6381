//! Forward construction of double ear decomposable graphs and the
//! bridges between a reduction trace and explicit certificates.
//!
//! An [`EarScript`] is a replayable program: an initial cycle, then a
//! sequence of subdivisions and double ears. Replay semantics are fixed
//! so scripts are portable artifacts: subdividing edge `e = (u, w)`
//! rewrites `e` to `(u, x)` in place and appends `(x, w)`; a double ear
//! on path `p0..pr` first appends the closing edge `(p0, pr)` (a loop
//! when the path is a single node) and then one duplicate per path edge
//! in path order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{EdgeId, Multigraph, NodeId};
use crate::reduce::{RecId, ReductionStep, ReductionTrace};
use crate::slotlist::SlotList;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptStep {
    /// Split an edge of the evolving graph at a fresh node.
    Subdivide { edge: u32 },
    /// Add a double ear along a degree-2 path (one node allowed).
    Ear { path: Vec<u32> },
}

/// A double ear decomposition as a construction program. Replaying a
/// script with `k` ear steps yields a graph with cycle number `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EarScript {
    pub initial_nodes: usize,
    /// Closed walk over the initial nodes; `[(0,0)]` is the one-node
    /// loop, `[(0,1),(1,0)]` the 2-cycle.
    pub initial_cycle: Vec<(u32, u32)>,
    pub steps: Vec<ScriptStep>,
}

impl EarScript {
    pub fn ear_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, ScriptStep::Ear { .. })).count()
    }

    pub fn expected_c(&self) -> usize {
        self.ear_count() + 1
    }
}

/// One cycle per inner list, as oriented original edges: consecutive
/// entries chain head to tail and the last closes back to the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<(EdgeId, NodeId, NodeId)>>,
}

/// Mutable replay state. Kept separate from [`Multigraph`] because
/// replay rewrites edges in place while `Multigraph` ids are immutable.
struct Builder {
    node_count: usize,
    edges: Vec<(u32, u32)>,
    degree: Vec<u32>,
    /// Neighbor multiset per node; a loop lists its node twice.
    adj: Vec<Vec<u32>>,
    deg2: SlotList,
}

impl Builder {
    fn new(node_count: usize) -> Self {
        Builder {
            node_count,
            edges: Vec::new(),
            degree: vec![0; node_count],
            adj: vec![Vec::new(); node_count],
            deg2: SlotList::with_capacity(node_count),
        }
    }

    fn bump(&mut self, v: u32, by: u32) {
        let old = self.degree[v as usize];
        let new = old + by;
        if old == 2 {
            self.deg2.remove(v);
        }
        if new == 2 {
            self.deg2.insert(v);
        }
        self.degree[v as usize] = new;
    }

    fn fresh_node(&mut self) -> u32 {
        let x = self.node_count as u32;
        self.node_count += 1;
        self.degree.push(0);
        self.adj.push(Vec::new());
        x
    }

    fn add_edge(&mut self, u: u32, v: u32) -> u32 {
        let id = self.edges.len() as u32;
        self.edges.push((u, v));
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        if u == v {
            self.bump(u, 2);
        } else {
            self.bump(u, 1);
            self.bump(v, 1);
        }
        id
    }

    fn subdivide(&mut self, e: u32) -> Result<u32, String> {
        if e as usize >= self.edges.len() {
            return Err(format!("subdivide references missing edge {e}"));
        }
        let (u, w) = self.edges[e as usize];
        let x = self.fresh_node();
        remove_one(&mut self.adj[u as usize], w);
        remove_one(&mut self.adj[w as usize], u);
        self.edges[e as usize] = (u, x);
        self.edges.push((x, w));
        self.adj[u as usize].push(x);
        self.adj[w as usize].push(x);
        self.adj[x as usize].push(u);
        self.adj[x as usize].push(w);
        self.bump(x, 2);
        Ok(x)
    }

    fn ear(&mut self, path: &[u32]) -> Result<(), String> {
        if path.is_empty() {
            return Err(String::from("ear with empty path"));
        }
        for &p in path {
            if p as usize >= self.node_count {
                return Err(format!("ear references missing node {p}"));
            }
            if self.degree[p as usize] != 2 {
                return Err(format!(
                    "ear path node {p} has degree {}, expected 2",
                    self.degree[p as usize]
                ));
            }
        }
        for w in path.windows(2) {
            if !self.adj[w[0] as usize].contains(&w[1]) {
                return Err(format!("ear path nodes {} and {} not adjacent", w[0], w[1]));
            }
        }
        self.add_edge(path[0], *path.last().unwrap());
        for w in path.windows(2) {
            self.add_edge(w[0], w[1]);
        }
        Ok(())
    }

    fn into_graph(self) -> Multigraph {
        Multigraph::from_edges(self.node_count, &self.edges)
    }
}

fn remove_one(list: &mut Vec<u32>, x: u32) {
    let i = list.iter().position(|&y| y == x).expect("adjacency out of sync");
    list.swap_remove(i);
}

fn seed_builder(s: &EarScript) -> Result<Builder, String> {
    if s.initial_cycle.is_empty() || s.initial_nodes == 0 {
        return Err(String::from("empty initial cycle"));
    }
    let mut b = Builder::new(s.initial_nodes);
    for (i, &(u, v)) in s.initial_cycle.iter().enumerate() {
        if u as usize >= s.initial_nodes || v as usize >= s.initial_nodes {
            return Err(format!("initial cycle edge {i} out of range"));
        }
        let next = s.initial_cycle[(i + 1) % s.initial_cycle.len()].0;
        if v != next {
            return Err(format!("initial cycle breaks between edges {i} and the next"));
        }
        b.add_edge(u, v);
    }
    if b.degree.iter().any(|&d| d != 2) {
        return Err(String::from("initial cycle is not a single simple cycle"));
    }
    Ok(b)
}

/// Replays a script. Returns the constructed graph and its expected
/// cycle number (ear count + 1).
pub fn apply_script(s: &EarScript) -> Result<(Multigraph, usize), String> {
    let mut b = seed_builder(s)?;
    for (i, step) in s.steps.iter().enumerate() {
        match step {
            ScriptStep::Subdivide { edge } => {
                b.subdivide(*edge).map_err(|e| format!("step {i}: {e}"))?;
            }
            ScriptStep::Ear { path } => {
                b.ear(path).map_err(|e| format!("step {i}: {e}"))?;
            }
        }
    }
    Ok((b.into_graph(), s.expected_c()))
}

/// Samples a script with exactly `ears` ear steps and at least
/// `subdivisions` subdivide steps, deterministically in `seed`. When an
/// ear is due but no degree-2 node exists, a subdivision is inserted
/// first; it consumes the subdivision budget when any remains and is
/// appended as an extra step otherwise, so `expected_c` stays exact.
pub fn random_script(seed: u64, ears: usize, subdivisions: usize) -> EarScript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.random_range(1..=5usize);
    let initial_cycle: Vec<(u32, u32)> =
        (0..len).map(|i| (i as u32, ((i + 1) % len) as u32)).collect();
    let mut script =
        EarScript { initial_nodes: len, initial_cycle: initial_cycle.clone(), steps: Vec::new() };
    let mut b = seed_builder(&script).expect("generated initial cycle is valid");

    let mut ears_left = ears;
    let mut subs_left = subdivisions;
    while ears_left + subs_left > 0 {
        let do_ear = rng.random_range(0..ears_left + subs_left) < ears_left;
        if do_ear {
            if b.deg2.is_empty() {
                let e = rng.random_range(0..b.edges.len()) as u32;
                b.subdivide(e).expect("edge index in range");
                script.steps.push(ScriptStep::Subdivide { edge: e });
                subs_left = subs_left.saturating_sub(1);
            }
            let path = random_deg2_path(&mut rng, &b);
            b.ear(&path).expect("sampled path is a degree-2 path");
            script.steps.push(ScriptStep::Ear { path });
            ears_left -= 1;
        } else {
            let e = rng.random_range(0..b.edges.len()) as u32;
            b.subdivide(e).expect("edge index in range");
            script.steps.push(ScriptStep::Subdivide { edge: e });
            subs_left -= 1;
        }
    }
    script
}

/// A random path of degree-2 nodes: uniform anchor, then up to three
/// random extension steps per direction while degree-2 neighbors last.
fn random_deg2_path(rng: &mut ChaCha8Rng, b: &Builder) -> Vec<u32> {
    let anchor = b.deg2.get(rng.random_range(0..b.deg2.len()));
    let mut path = vec![anchor];
    for dir in 0..2 {
        for _ in 0..rng.random_range(0..=3usize) {
            let tip = if dir == 0 { path[0] } else { *path.last().unwrap() };
            let next = b.adj[tip as usize]
                .iter()
                .copied()
                .find(|w| b.degree[*w as usize] == 2 && !path.contains(w));
            match next {
                Some(w) if dir == 0 => path.insert(0, w),
                Some(w) => path.push(w),
                None => break,
            }
        }
    }
    path
}

/// Expands a trace into the explicit minimum cycle decomposition it
/// proves: one cycle per counting step, two for the quadruple edge.
pub fn lift_cycles(g: &Multigraph, trace: &ReductionTrace) -> CycleDecomposition {
    let arena = &trace.arena;
    let mut cycles = Vec::new();
    let mut covered = 0usize;
    for step in &trace.steps {
        match step {
            ReductionStep::LoopRemoved { node, copy }
            | ReductionStep::FinalLoop { node, copy } => {
                cycles.push(arena.expand_from(*copy, *node));
            }
            ReductionStep::DoubleEdgePath { nodes, path, closing } => {
                let mut cycle = Vec::new();
                for (i, &r) in path.iter().enumerate() {
                    cycle.extend(arena.expand_from(r, nodes[i]));
                }
                cycle.extend(arena.expand_from(*closing, *nodes.last().unwrap()));
                cycles.push(cycle);
            }
            ReductionStep::TripleEdge { ends, copies } => {
                cycles.push(two_cycle(arena, *ends, copies));
            }
            ReductionStep::QuadrupleEdge { ends, pairs } => {
                cycles.push(two_cycle(arena, *ends, &pairs[0]));
                cycles.push(two_cycle(arena, *ends, &pairs[1]));
            }
            ReductionStep::Resolved { .. } => {}
        }
    }
    for c in &cycles {
        covered += c.len();
    }
    assert_eq!(covered, g.edge_count(), "trace does not cover the graph");
    CycleDecomposition { cycles }
}

fn two_cycle(
    arena: &crate::reduce::RecordArena,
    ends: (NodeId, NodeId),
    copies: &[RecId; 2],
) -> Vec<(EdgeId, NodeId, NodeId)> {
    let mut cycle = arena.expand_from(copies[0], ends.0);
    cycle.extend(arena.expand_from(copies[1], ends.1));
    cycle
}

/// Checks a claimed decomposition: every edge covered exactly once,
/// every cycle a closed walk with consistent endpoints and no repeated
/// node. Returns the first violation found.
pub fn validate_decomposition(g: &Multigraph, d: &CycleDecomposition) -> Result<(), String> {
    let mut covered = vec![false; g.edge_count()];
    for (k, cycle) in d.cycles.iter().enumerate() {
        if cycle.is_empty() {
            return Err(format!("cycle {k} is empty"));
        }
        let mut seen_nodes: Vec<NodeId> = Vec::new();
        for (i, &(e, a, b)) in cycle.iter().enumerate() {
            if e.index() >= g.edge_count() {
                return Err(format!("unknown edge id {e}"));
            }
            if covered[e.index()] {
                return Err(format!("edge {e} covered twice"));
            }
            covered[e.index()] = true;
            let (u, v) = g.endpoints(e);
            if (a, b) != (u, v) && (a, b) != (v, u) {
                return Err(format!("edge {e} oriented as {a}-{b} but joins {u}-{v}"));
            }
            let next = cycle[(i + 1) % cycle.len()].1;
            if b != next {
                return Err(format!("cycle {k} breaks after edge {e}"));
            }
            if a != b && seen_nodes.contains(&a) {
                return Err(format!("node {a} repeated in cycle {k}"));
            }
            seen_nodes.push(a);
        }
    }
    if let Some(e) = covered.iter().position(|&c| !c) {
        return Err(format!("edge {e} uncovered"));
    }
    Ok(())
}

/// Recovers a double ear construction script from a trace by reversing
/// it: the terminal step seeds the initial cycle, loop removals and
/// path steps become ears, resolutions become subdivisions. The result
/// is certified at the invariant level (replay gives a graph with the
/// same node count, edge count and cycle number), not as a labeled
/// reconstruction of `g`.
pub fn ear_script_from_trace(g: &Multigraph, trace: &ReductionTrace) -> Result<EarScript, String> {
    let arena = &trace.arena;
    let mut rev = trace.steps.iter().rev();
    // nu: engine node -> replay node; phi: provenance record -> replay edge
    let mut nu: Vec<Option<u32>> = vec![None; g.node_count()];
    let mut phi: Vec<Option<u32>> = vec![None; arena.len()];
    // replay edge list simulated without validation; indices must match
    // what apply_script will assign
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut next_node: u32;

    let mut script = match rev.next() {
        Some(ReductionStep::FinalLoop { node, copy }) => {
            nu[node.index()] = Some(0);
            phi[copy.0 as usize] = Some(0);
            edges.push((0, 0));
            next_node = 1;
            EarScript { initial_nodes: 1, initial_cycle: vec![(0, 0)], steps: Vec::new() }
        }
        Some(ReductionStep::QuadrupleEdge { ends, pairs }) => {
            nu[ends.0.index()] = Some(0);
            nu[ends.1.index()] = Some(1);
            edges.push((0, 1));
            edges.push((1, 0));
            edges.push((0, 1));
            edges.push((0, 1));
            for (r, e) in [pairs[0][0], pairs[0][1], pairs[1][0], pairs[1][1]].iter().zip(0u32..) {
                phi[r.0 as usize] = Some(e);
            }
            next_node = 2;
            EarScript {
                initial_nodes: 2,
                initial_cycle: vec![(0, 1), (1, 0)],
                steps: vec![ScriptStep::Ear { path: vec![0, 1] }],
            }
        }
        _ => return Err(String::from("trace does not end in a terminal step")),
    };

    let need = |x: Option<u32>| x.ok_or_else(|| String::from("trace references an unseen node"));
    for step in rev {
        match step {
            ReductionStep::FinalLoop { .. } | ReductionStep::QuadrupleEdge { .. } => {
                return Err(String::from("terminal step in trace interior"));
            }
            ReductionStep::LoopRemoved { node, copy } => {
                let x = need(nu[node.index()])?;
                phi[copy.0 as usize] = Some(edges.len() as u32);
                edges.push((x, x));
                script.steps.push(ScriptStep::Ear { path: vec![x] });
            }
            ReductionStep::TripleEdge { ends, copies } => {
                let (a, b) = (need(nu[ends.0.index()])?, need(nu[ends.1.index()])?);
                phi[copies[0].0 as usize] = Some(edges.len() as u32);
                edges.push((a, b));
                phi[copies[1].0 as usize] = Some(edges.len() as u32);
                edges.push((a, b));
                script.steps.push(ScriptStep::Ear { path: vec![a, b] });
            }
            ReductionStep::DoubleEdgePath { nodes, path, closing } => {
                let mut p = Vec::with_capacity(nodes.len());
                for n in nodes {
                    p.push(need(nu[n.index()])?);
                }
                phi[closing.0 as usize] = Some(edges.len() as u32);
                edges.push((p[0], *p.last().unwrap()));
                for (i, r) in path.iter().enumerate() {
                    phi[r.0 as usize] = Some(edges.len() as u32);
                    edges.push((p[i], p[i + 1]));
                }
                script.steps.push(ScriptStep::Ear { path: p });
            }
            ReductionStep::Resolved { node, merged, .. } => {
                let Some((left, right, via)) = arena.children(*merged) else {
                    return Err(String::from("resolved step without a merge record"));
                };
                debug_assert_eq!(via, *node);
                let ei = phi[merged.0 as usize]
                    .ok_or_else(|| String::from("resolved copy never reached a cycle"))?;
                let (a, b) = edges[ei as usize];
                let (e0, _) = arena.ends(*merged);
                let x = next_node;
                next_node += 1;
                nu[node.index()] = Some(x);
                // replay keeps the (a, x) half under the old edge id and
                // appends (x, b); hand the halves to the matching children
                let (keep, appended) =
                    if Some(a) == nu[e0.index()] { (left, right) } else { (right, left) };
                phi[keep.0 as usize] = Some(ei);
                phi[appended.0 as usize] = Some(edges.len() as u32);
                edges[ei as usize] = (a, x);
                edges.push((x, b));
                script.steps.push(ScriptStep::Subdivide { edge: ei });
            }
        }
    }
    if next_node as usize != g.node_count() || edges.len() != g.edge_count() {
        return Err(String::from("trace does not rebuild the graph"));
    }
    Ok(script)
}
