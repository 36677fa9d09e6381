//! Linear-time reduction engine.
//!
//! Works on a weighted-bundle view of the input: parallel edges are
//! collapsed into bundles carrying their multiplicity, nodes of degree
//! 2 and 4 live in membership lists `V2`/`V4`, non-loop bundles of
//! weight 2, 3, 4 in `E2`/`E3`/`E4`, and loop bundles in `L`. Five
//! reduction steps (loop removal, resolving, quadruple, triple and
//! double edges) shrink the state while counting cycles; every removed
//! or merged edge copy keeps a provenance record so the final cycle
//! decomposition can be expanded back to original edge ids.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{EdgeId, Multigraph, NodeId};

/// Index into a [`RecordArena`].
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub struct RecId(pub u32);

/// Inline list of at most 4 elements. The degree bound caps both the
/// copies of a bundle and the non-loop bundles at a node, so these
/// lists live inside their owners instead of on the heap; at a million
/// edges the saved indirections dominate the engine's wall time.
#[derive(Copy, Clone, Debug, Default)]
struct Quad<T> {
    items: [T; 4],
    len: u8,
}

impl<T: Copy + Default + PartialEq> Quad<T> {
    fn of(x: T) -> Self {
        let mut q = Quad::default();
        q.push(x);
        q
    }

    fn push(&mut self, x: T) {
        self.items[self.len as usize] = x;
        self.len += 1;
    }

    fn pop(&mut self) -> Option<T> {
        if self.len == 0 {
            return None;
        }
        self.len -= 1;
        Some(self.items[self.len as usize])
    }

    fn clear(&mut self) {
        self.len = 0;
    }

    fn retain(&mut self, keep: impl Fn(&T) -> bool) {
        let mut kept = 0u8;
        for i in 0..self.len as usize {
            if keep(&self.items[i]) {
                self.items[kept as usize] = self.items[i];
                kept += 1;
            }
        }
        self.len = kept;
    }

    /// All four slots including stale ones past `len`, for branch-lean
    /// prefetch staging. Stale slots hold former entries (or the
    /// default), never arbitrary values.
    fn raw(&self) -> &[T; 4] {
        &self.items
    }
}

impl<T> core::ops::Deref for Quad<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.items[..self.len as usize]
    }
}

#[derive(Clone, Debug)]
enum RecKind {
    Leaf(EdgeId),
    Concat { left: RecId, right: RecId, via: NodeId },
}

#[derive(Clone, Debug)]
struct RecNode {
    kind: RecKind,
    ends: (NodeId, NodeId),
}

/// Provenance records for edge copies. A leaf is one original edge; a
/// concat joins two walks at a resolved degree-2 node. Expanding a
/// record yields a walk in the original graph whose interior nodes are
/// exactly the resolved `via` nodes.
#[derive(Clone, Debug, Default)]
pub struct RecordArena {
    nodes: Vec<RecNode>,
}

impl RecordArena {
    fn leaf(&mut self, e: EdgeId, ends: (NodeId, NodeId)) -> RecId {
        self.nodes.push(RecNode { kind: RecKind::Leaf(e), ends });
        RecId(self.nodes.len() as u32 - 1)
    }

    fn concat(&mut self, left: RecId, right: RecId, via: NodeId, ends: (NodeId, NodeId)) -> RecId {
        self.nodes.push(RecNode { kind: RecKind::Concat { left, right, via }, ends });
        RecId(self.nodes.len() as u32 - 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ends(&self, r: RecId) -> (NodeId, NodeId) {
        self.nodes[r.0 as usize].ends
    }

    /// The two direct children of a merge record, ordered so that the
    /// first touches `ends().0` and the second `ends().1`.
    pub fn children(&self, r: RecId) -> Option<(RecId, RecId, NodeId)> {
        match self.nodes[r.0 as usize].kind {
            RecKind::Leaf(_) => None,
            RecKind::Concat { left, right, via } => Some((left, right, via)),
        }
    }

    /// Expands `r` into the oriented original-edge walk starting at
    /// `start`, which must be one of the record's ends. Iterative, so
    /// arbitrarily deep merge chains are fine.
    pub fn expand_from(&self, r: RecId, start: NodeId) -> Vec<(EdgeId, NodeId, NodeId)> {
        let mut out = Vec::new();
        let mut stack = vec![(r, start)];
        while let Some((r, s)) = stack.pop() {
            let node = &self.nodes[r.0 as usize];
            match node.kind {
                RecKind::Leaf(e) => {
                    let (a, b) = node.ends;
                    let other = if a == s { b } else { a };
                    out.push((e, s, other));
                }
                RecKind::Concat { left, right, via } => {
                    // left joins ends.0 with via, right joins via with ends.1
                    let (first, second) = if s == node.ends.0 { (left, right) } else { (right, left) };
                    stack.push((second, via));
                    stack.push((first, s));
                }
            }
        }
        out
    }
}

/// One applied reduction step, carrying enough records to expand its
/// contributed cycle(s) back to original edge ids.
#[derive(Clone, Debug)]
pub enum ReductionStep {
    /// Reduction I on a non-final loop: one cycle.
    LoopRemoved { node: NodeId, copy: RecId },
    /// Reduction I on the last remaining edge: one cycle, terminal.
    FinalLoop { node: NodeId, copy: RecId },
    /// Reduction II: the path copies plus the closing copy form one cycle.
    DoubleEdgePath { nodes: Vec<NodeId>, path: Vec<RecId>, closing: RecId },
    /// Reduction III: the two removed copies form one cycle.
    TripleEdge { ends: (NodeId, NodeId), copies: [RecId; 2] },
    /// Reduction IV: two length-two cycles, terminal.
    QuadrupleEdge { ends: (NodeId, NodeId), pairs: [[RecId; 2]; 2] },
    /// Reduction V: no cycle; the two copies at `node` merge into one.
    Resolved { node: NodeId, ends: (NodeId, NodeId), merged: RecId },
}

impl ReductionStep {
    /// Number of cycles this step contributes to `c`.
    pub fn cycles(&self) -> usize {
        match self {
            ReductionStep::LoopRemoved { .. }
            | ReductionStep::FinalLoop { .. }
            | ReductionStep::DoubleEdgePath { .. }
            | ReductionStep::TripleEdge { .. } => 1,
            ReductionStep::QuadrupleEdge { .. } => 2,
            ReductionStep::Resolved { .. } => 0,
        }
    }
}

/// Ordered record of the applied reductions; the source of both the
/// cycle count and the lifted cycle decomposition.
#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub arena: RecordArena,
    pub steps_applied: usize,
}

/// Outcome of running the engine on a connected graph.
#[derive(Clone, Debug)]
pub enum DecompositionResult {
    Decomposable { c: usize, trace: ReductionTrace },
    NotDecomposable { reason: String },
}

impl DecompositionResult {
    pub fn is_decomposable(&self) -> bool {
        matches!(self, DecompositionResult::Decomposable { .. })
    }

    pub fn cycle_count(&self) -> Option<usize> {
        match self {
            DecompositionResult::Decomposable { c, .. } => Some(*c),
            DecompositionResult::NotDecomposable { .. } => None,
        }
    }
}

/// Which entry the engine picks when a step has several legal choices.
/// The cycle count is choice-independent; only the emitted cycles'
/// edge ids vary.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub enum ChoicePolicy {
    #[default]
    FirstEntry,
    LastEntry,
}

/// Aligned like [`NodeState`]: one cache line covers a whole bundle.
#[derive(Clone, Debug)]
#[repr(align(32))]
struct Bundle {
    u: NodeId,
    v: NodeId,
    copies: Quad<RecId>,
    alive: bool,
}

impl Bundle {
    fn is_loop(&self) -> bool {
        self.u == self.v
    }

    fn other(&self, x: NodeId) -> NodeId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Push-only candidate list with lazy deletion. Entries can go stale
/// when their qualifying condition stops holding; picking re-checks
/// validity and discards stale entries, which is sound because any
/// candidate that requalifies is pushed again at that moment. Compared
/// to a strict membership structure this trades a back-pointer array
/// (one random cache miss per update at large sizes) for cheap
/// sequential pushes.
#[derive(Clone, Debug, Default)]
struct LazyList {
    items: Vec<u32>,
    /// First slot not yet consumed or skipped by FirstEntry picking.
    head: usize,
    /// Number of currently valid candidates, maintained by callers.
    live: usize,
}

impl LazyList {
    fn push(&mut self, id: u32) {
        self.items.push(id);
    }

    fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Entries FirstEntry picking can still reach; valid candidates are
    /// always in here (LastEntry pops discard only stale entries).
    fn active(&self) -> &[u32] {
        &self.items[self.head..]
    }
}

/// The policy-preferred valid entry of `list`, discarding stale entries
/// on the way. Returns `None` exactly when no valid candidate exists.
fn pick_lazy(list: &mut LazyList, policy: ChoicePolicy, valid: impl Fn(u32) -> bool) -> Option<u32> {
    if list.live == 0 {
        return None;
    }
    match policy {
        ChoicePolicy::FirstEntry => loop {
            let cand = list.items[list.head];
            if valid(cand) {
                return Some(cand);
            }
            list.head += 1;
        },
        ChoicePolicy::LastEntry => loop {
            let cand = *list.items.last().expect("live count positive but list empty");
            if valid(cand) {
                return Some(cand);
            }
            list.items.pop();
        },
    }
}

/// Like [`pick_lazy`], but consumes the returned entry, so a caller can
/// park candidates elsewhere (the resolve pipeline) without the list
/// handing them out twice. Exhausting the list is not the same as no
/// candidate existing: parked candidates live outside it.
fn pick_take(list: &mut LazyList, policy: ChoicePolicy, valid: impl Fn(u32) -> bool) -> Option<u32> {
    match policy {
        ChoicePolicy::FirstEntry => loop {
            let cand = *list.items.get(list.head)?;
            list.head += 1;
            if valid(cand) {
                return Some(cand);
            }
        },
        ChoicePolicy::LastEntry => loop {
            let cand = list.items.pop()?;
            if valid(cand) {
                return Some(cand);
            }
        },
    }
}

/// Best-effort cache line prefetch: a forced load whose value is
/// discarded, so out-of-order execution overlaps the miss with the
/// surrounding work. The resolve chain walks randomly-placed nodes and
/// bundles; issuing the next step's loads one step early hides most of
/// their latency.
#[inline]
fn prefetch<T: Copy>(x: &T) {
    core::hint::black_box(*x);
}


/// Sentinel for "no loop bundle"; a plain u32 keeps [`NodeState`] within
/// 32 bytes.
const NO_BUNDLE: u32 = u32::MAX;

/// Per-node engine state, kept in one struct so a node touch costs one
/// cache line instead of four. The alignment keeps the 29 payload bytes
/// inside a single cache line; without it every other entry straddles
/// two, defeating the prefetch staging in [`WorkState::drain_easy`].
#[derive(Clone, Debug)]
#[repr(align(32))]
struct NodeState {
    degree: u32,
    /// Live loop bundle at this node (a node has at most one), or
    /// [`NO_BUNDLE`].
    loop_bundle: u32,
    /// Live non-loop bundle ids; at most 4 under the degree
    /// precondition.
    incident: Quad<u32>,
    /// Path-marker scratch for Reduction II.
    visited: bool,
}

impl Default for NodeState {
    fn default() -> Self {
        NodeState { degree: 0, loop_bundle: NO_BUNDLE, incident: Quad::default(), visited: false }
    }
}

/// Mutable reduction state over one connected input graph.
pub struct WorkState {
    bundles: Vec<Bundle>,
    nodes: Vec<NodeState>,
    v2: LazyList,
    /// Count of degree-4 nodes; nothing picks them, so no list.
    v4_count: usize,
    e2: LazyList,
    e3: LazyList,
    e4: LazyList,
    loops: LazyList,
    /// Scratch for the Reduction II seed sweep, cleared after each use.
    tried: Vec<bool>,
    live_copies: usize,
    live_nodes: usize,
    live_bundles: usize,
    c: usize,
    steps: Vec<ReductionStep>,
    arena: RecordArena,
    finished: bool,
    steps_applied: usize,
    policy: ChoicePolicy,
}

impl WorkState {
    pub fn c(&self) -> usize {
        self.c
    }

    pub fn finished(&self) -> bool {
        self.finished
    }

    pub fn live_edge_copies(&self) -> usize {
        self.live_copies
    }

    pub fn steps_applied(&self) -> usize {
        self.steps_applied
    }

    pub fn steps(&self) -> &[ReductionStep] {
        &self.steps
    }

    pub fn into_trace(self) -> ReductionTrace {
        ReductionTrace { steps: self.steps, arena: self.arena, steps_applied: self.steps_applied }
    }

    fn weight_list(&mut self, w: usize) -> Option<&mut LazyList> {
        match w {
            2 => Some(&mut self.e2),
            3 => Some(&mut self.e3),
            4 => Some(&mut self.e4),
            _ => None,
        }
    }

    fn enlist_bundle(&mut self, bid: u32, w: usize) {
        if self.bundles[bid as usize].is_loop() {
            return;
        }
        if let Some(list) = self.weight_list(w) {
            list.push(bid);
            list.live += 1;
        }
    }

    fn delist_bundle(&mut self, bid: u32, w: usize) {
        if self.bundles[bid as usize].is_loop() {
            return;
        }
        if let Some(list) = self.weight_list(w) {
            list.live -= 1;
        }
    }

    fn set_degree(&mut self, v: NodeId, new: u32) {
        let old = self.nodes[v.index()].degree;
        if old == new {
            return;
        }
        match old {
            2 => self.v2.live -= 1,
            4 => self.v4_count -= 1,
            _ => {}
        }
        match new {
            2 => {
                self.v2.push(v.0);
                self.v2.live += 1;
            }
            4 => self.v4_count += 1,
            0 => self.live_nodes -= 1,
            _ => {}
        }
        self.nodes[v.index()].degree = new;
    }

    /// Removes the last copy of bundle `bid`, maintaining weight lists,
    /// degrees and liveness counters. The bundle dies at weight 0.
    fn remove_copy(&mut self, bid: u32) -> RecId {
        debug_assert!(self.bundles[bid as usize].alive);
        let rec = self.bundles[bid as usize].copies.pop().expect("copy removal from empty bundle");
        let (u, v) = (self.bundles[bid as usize].u, self.bundles[bid as usize].v);
        let w = self.bundles[bid as usize].copies.len();
        self.live_copies -= 1;
        if u == v {
            if w == 0 {
                self.bundles[bid as usize].alive = false;
                self.loops.live -= 1;
                self.nodes[u.index()].loop_bundle = NO_BUNDLE;
                self.live_bundles -= 1;
            }
            self.set_degree(u, self.nodes[u.index()].degree - 2);
        } else {
            self.delist_bundle(bid, w + 1);
            if w == 0 {
                self.bundles[bid as usize].alive = false;
                self.nodes[u.index()].incident.retain(|&x| x != bid);
                self.nodes[v.index()].incident.retain(|&x| x != bid);
                self.live_bundles -= 1;
            } else {
                self.enlist_bundle(bid, w);
            }
            self.set_degree(u, self.nodes[u.index()].degree - 1);
            self.set_degree(v, self.nodes[v.index()].degree - 1);
        }
        rec
    }

    fn new_bundle(&mut self, u: NodeId, v: NodeId, copy: RecId) -> u32 {
        let bid = self.bundles.len() as u32;
        self.bundles.push(Bundle { u, v, copies: Quad::of(copy), alive: true });
        self.live_bundles += 1;
        if u == v {
            debug_assert_eq!(self.nodes[u.index()].loop_bundle, NO_BUNDLE);
            self.nodes[u.index()].loop_bundle = bid;
            self.loops.push(bid);
            self.loops.live += 1;
        } else {
            self.nodes[u.index()].incident.push(bid);
            self.nodes[v.index()].incident.push(bid);
        }
        bid
    }

    /// Reinstalls a dead bundle slot as a fresh bundle, keeping the
    /// bundles vec from growing during resolve chains. Because ids get
    /// reused, lazy-list validity checks must test the bundle's kind
    /// (loop or weight), never liveness alone.
    fn reuse_bundle(&mut self, bid: u32, u: NodeId, v: NodeId, copy: RecId) {
        debug_assert!(!self.bundles[bid as usize].alive);
        self.bundles[bid as usize] = Bundle { u, v, copies: Quad::of(copy), alive: true };
        self.live_bundles += 1;
        if u == v {
            debug_assert_eq!(self.nodes[u.index()].loop_bundle, NO_BUNDLE);
            self.nodes[u.index()].loop_bundle = bid;
            self.loops.push(bid);
            self.loops.live += 1;
        } else {
            self.nodes[u.index()].incident.push(bid);
            self.nodes[v.index()].incident.push(bid);
        }
    }

    fn find_bundle(&self, u: NodeId, v: NodeId) -> Option<u32> {
        if u == v {
            let lb = self.nodes[u.index()].loop_bundle;
            return (lb != NO_BUNDLE).then_some(lb);
        }
        self.nodes[u.index()].incident
            .iter()
            .copied()
            .find(|&bid| self.bundles[bid as usize].other(u) == v)
    }

    /// Reduction I. Removes one loop copy and counts one cycle; the
    /// last remaining edge of the graph terminates the run. Returns
    /// false when no loop exists.
    pub fn step_loop(&mut self) -> bool {
        let Self { loops, bundles, policy, .. } = self;
        let Some(bid) =
            pick_lazy(loops, *policy, |b| bundles[b as usize].alive && bundles[b as usize].is_loop())
        else {
            return false;
        };
        let node = self.bundles[bid as usize].u;
        let last_edge = self.live_copies == 1;
        let copy = self.remove_copy(bid);
        self.c += 1;
        self.steps_applied += 1;
        if last_edge {
            self.steps.push(ReductionStep::FinalLoop { node, copy });
            self.finished = true;
        } else {
            self.steps.push(ReductionStep::LoopRemoved { node, copy });
        }
        true
    }

    /// Reduction V. Suppresses one degree-2 node, merging its two edge
    /// copies. Returns false when `V2` is empty or a single node
    /// remains. Must only run while no loops exist.
    pub fn step_resolve(&mut self) -> bool {
        debug_assert!(self.loops.is_empty());
        if self.live_nodes <= 1 {
            return false;
        }
        let picked = {
            let Self { v2, nodes, policy, .. } = self;
            pick_lazy(v2, *policy, |id| nodes[id as usize].degree == 2)
        };
        let Some(v) = picked.map(NodeId) else {
            return false;
        };
        self.resolve_at(v);
        true
    }

    /// The mutation body of Reduction V at a known degree-2 node.
    fn resolve_at(&mut self, v: NodeId) {
        debug_assert!(self.live_nodes > 1);
        debug_assert_eq!(self.nodes[v.index()].degree, 2);
        let inc = &self.nodes[v.index()].incident;
        debug_assert!(!inc.is_empty(), "degree-2 node without incident bundles");
        let merged;
        let (u, w);
        if inc.len() == 1 {
            // one weight-2 bundle: merging its copies closes a loop at
            // the shared neighbor
            let bid = inc[0];
            let b = &self.bundles[bid as usize];
            debug_assert_eq!(b.copies.len(), 2);
            u = b.other(v);
            w = u;
            let (c0, c1) = (b.copies[0], b.copies[1]);
            merged = self.arena.concat(c0, c1, v, (u, u));
            self.e2.live -= 1;
            self.bundles[bid as usize].alive = false;
            self.nodes[u.index()].incident.retain(|&x| x != bid);
            self.nodes[v.index()].incident.clear();
            self.live_bundles -= 1;
            self.live_copies -= 1;
            self.set_degree(v, 0);
            self.reuse_bundle(bid, u, u, merged);
        } else {
            debug_assert_eq!(inc.len(), 2);
            let (b1, b2) = (inc[0], inc[1]);
            u = self.bundles[b1 as usize].other(v);
            w = self.bundles[b2 as usize].other(v);
            prefetch(&self.nodes[u.index()].degree);
            prefetch(&self.nodes[w.index()].degree);
            let c0 = self.bundles[b1 as usize].copies[0];
            let c1 = self.bundles[b2 as usize].copies[0];
            merged = self.arena.concat(c0, c1, v, (u, w));
            for bid in [b1, b2] {
                let other = self.bundles[bid as usize].other(v);
                self.bundles[bid as usize].alive = false;
                self.nodes[other.index()].incident.retain(|&x| x != bid);
                self.live_bundles -= 1;
            }
            self.nodes[v.index()].incident.clear();
            self.live_copies -= 2;
            self.set_degree(v, 0);
            if let Some(bid) = self.find_bundle(u, w) {
                let w_old = self.bundles[bid as usize].copies.len();
                debug_assert!(w_old < 4, "bundle weight 5 implies degree above 4");
                self.delist_bundle(bid, w_old);
                self.bundles[bid as usize].copies.push(merged);
                self.enlist_bundle(bid, w_old + 1);
                self.live_copies += 1;
            } else {
                self.reuse_bundle(b1, u, w, merged);
                self.live_copies += 1;
            }
        }
        self.steps_applied += 1;
        self.steps.push(ReductionStep::Resolved { node: v, ends: (u, w), merged });
    }

    /// Applies Reductions I and V until neither applies, in batches.
    ///
    /// Stepping one candidate at a time pays full DRAM latency per step
    /// once the state outgrows cache: each resolve is a short dependent
    /// chase (node line, then bundle lines, then far node lines).
    /// Staging a generation of `BURST` independent candidates per chase
    /// stage lets their misses overlap, which this machine resolves
    /// several times faster than one at a time. Candidates taken out of
    /// `V2` are parked in the generation buffers; the loop only exits
    /// once the buffers are drained, so none are lost. Processing order
    /// stays the deterministic policy order; the cycle count does not
    /// depend on choice order.
    pub fn drain_easy(&mut self) {
        while self.step_loop() {
            if self.finished {
                return;
            }
        }
        const BURST: usize = 32;
        const NONE: u32 = u32::MAX;
        // The stage loops speculate: they read stale slots past a
        // Quad's len and candidates that lost their degree, clamped
        // into bounds so every load is safe. A wrong line fetched for a
        // stale slot costs nothing; keeping the loops branch-lean is
        // what lets the out-of-order core hold many slots in flight.
        let node_cap = self.nodes.len().saturating_sub(1) as u32;
        let bundle_cap = self.bundles.len().saturating_sub(1) as u32;
        // staged[0]: node lines requested, staged[1]: bundle lines
        // requested, staged[2]: far node lines requested, staged[3]:
        // far nodes' other bundle lines requested (the merge target
        // that find_bundle scans), ready to go.
        let mut staged = [[NONE; BURST]; 4];
        loop {
            let mut busy = false;
            for &cand in staged[3].iter() {
                if cand == NONE {
                    continue;
                }
                busy = true;
                // Staleness check: a neighbouring resolve or an inline
                // loop removal may have consumed this node meanwhile.
                if self.live_nodes > 1 && self.nodes[cand as usize].degree == 2 {
                    self.resolve_at(NodeId(cand));
                    while !self.loops.is_empty() {
                        self.step_loop();
                        if self.finished {
                            return;
                        }
                    }
                }
            }
            staged[3] = staged[2];
            for &cand in staged[3].iter() {
                busy |= cand != NONE;
                if cand == NONE {
                    continue;
                }
                // Only the first bundle's far side: that is the side
                // find_bundle scans for the merge target.
                let bid = self.nodes[cand as usize].incident.raw()[0].min(bundle_cap);
                let b = &self.bundles[bid as usize];
                let far = (b.u.0 ^ b.v.0 ^ cand).min(node_cap);
                for &fbid in self.nodes[far as usize].incident.raw() {
                    prefetch(&self.bundles[fbid.min(bundle_cap) as usize].u);
                }
            }
            staged[2] = staged[1];
            for &cand in staged[2].iter() {
                busy |= cand != NONE;
                if cand == NONE {
                    continue;
                }
                for i in 0..2 {
                    let bid = self.nodes[cand as usize].incident.raw()[i].min(bundle_cap);
                    let b = &self.bundles[bid as usize];
                    let far = (b.u.0 ^ b.v.0 ^ cand).min(node_cap);
                    prefetch(&self.nodes[far as usize].degree);
                }
            }
            staged[1] = staged[0];
            for &cand in staged[1].iter() {
                busy |= cand != NONE;
                if cand == NONE {
                    continue;
                }
                for i in 0..2 {
                    let bid = self.nodes[cand as usize].incident.raw()[i].min(bundle_cap);
                    prefetch(&self.bundles[bid as usize].u);
                }
            }
            for slot in staged[0].iter_mut() {
                let Self { v2, nodes, policy, .. } = self;
                *slot = match pick_take(v2, *policy, |id| nodes[id as usize].degree == 2) {
                    Some(id) => {
                        prefetch(&self.nodes[id as usize].degree);
                        busy = true;
                        id
                    }
                    None => NONE,
                };
            }
            if !busy {
                return;
            }
        }
    }

    /// Reduction IV. A quadruple edge must be the entire remaining
    /// graph; anything else means the input was outside the class.
    /// Terminal on success. `Ok(false)` when `E4` is empty.
    pub fn step_quadruple(&mut self) -> Result<bool, String> {
        debug_assert!(self.loops.is_empty() && self.v2.is_empty());
        let picked = {
            let Self { e4, bundles, policy, .. } = self;
            pick_lazy(e4, *policy, |b| {
                bundles[b as usize].alive && bundles[b as usize].copies.len() == 4
            })
        };
        let Some(bid) = picked else {
            return Ok(false);
        };
        if self.live_nodes != 2 || self.live_bundles != 1 || self.live_copies != 4 {
            let b = &self.bundles[bid as usize];
            return Err(format!(
                "quadruple edge between nodes {} and {} is not the whole graph",
                b.u, b.v
            ));
        }
        let ends = (self.bundles[bid as usize].u, self.bundles[bid as usize].v);
        let copies = self.bundles[bid as usize].copies;
        for _ in 0..4 {
            self.remove_copy(bid);
        }
        self.c += 2;
        self.steps_applied += 1;
        self.steps.push(ReductionStep::QuadrupleEdge {
            ends,
            pairs: [[copies[0], copies[1]], [copies[2], copies[3]]],
        });
        self.finished = true;
        Ok(true)
    }

    /// Reduction III. Removes two copies of a triple bundle; both
    /// endpoints drop from degree 4 to 2. Returns false when `E3` is
    /// empty.
    pub fn step_triple(&mut self) -> bool {
        debug_assert!(self.loops.is_empty() && self.v2.is_empty() && self.e4.is_empty());
        let picked = {
            let Self { e3, bundles, policy, .. } = self;
            pick_lazy(e3, *policy, |b| {
                bundles[b as usize].alive && bundles[b as usize].copies.len() == 3
            })
        };
        let Some(bid) = picked else {
            return false;
        };
        debug_assert!(!self.bundles[bid as usize].is_loop());
        let ends = (self.bundles[bid as usize].u, self.bundles[bid as usize].v);
        let r1 = self.remove_copy(bid);
        let r2 = self.remove_copy(bid);
        self.c += 1;
        self.steps_applied += 1;
        self.steps.push(ReductionStep::TripleEdge { ends, copies: [r1, r2] });
        true
    }

    /// Reduction II. Grows an inclusion-wise maximal path of double
    /// bundles through the seed, removes one copy per path bundle plus
    /// one closing copy between the path's endpoints. `Ok(false)` when
    /// `E2` is empty; an error when the endpoints are not adjacent
    /// (stuck state, input outside the class).
    pub fn step_double(&mut self) -> Result<bool, String> {
        debug_assert!(
            self.loops.is_empty() && self.v2.is_empty() && self.e4.is_empty() && self.e3.is_empty()
        );
        if self.e2.is_empty() {
            return Ok(false);
        }
        // The maximal path through a double edge is unique, but not
        // every one closes even on decomposable inputs, so candidates
        // are swept until one does. Paths of distinct seeds are
        // bundle-disjoint, and the sweep stops at the first success,
        // so the usual cost is one path; only stuck-adjacent states
        // pay for more.
        if self.tried.len() < self.bundles.len() {
            self.tried.resize(self.bundles.len(), false);
        }
        // compact stale entries out of E2 first: each removal is paid
        // for by the push that created the entry, and the sweep then
        // sees every live double exactly through its slots
        {
            let Self { e2, bundles, .. } = self;
            e2.items.retain(|&b| {
                let bu = &bundles[b as usize];
                bu.alive && !bu.is_loop() && bu.copies.len() == 2
            });
            e2.head = 0;
        }
        let mut tried_marks: Vec<u32> = Vec::new();
        let mut found: Option<(Vec<NodeId>, Vec<u32>, u32)> = None;
        let mut last_open = (NodeId(0), NodeId(0));
        for i in 0..self.e2.items.len() {
            let slot = match self.policy {
                ChoicePolicy::FirstEntry => i,
                ChoicePolicy::LastEntry => self.e2.items.len() - 1 - i,
            };
            let seed = self.e2.items[slot];
            if self.tried[seed as usize] {
                continue;
            }
            let (nodes, path_bundles) = self.maximal_double_path(seed);
            for &b in &path_bundles {
                if !self.tried[b as usize] {
                    self.tried[b as usize] = true;
                    tried_marks.push(b);
                }
            }
            let v0 = nodes[0];
            let vl = *nodes.last().unwrap();
            // the closing edge must be distinct from the path's own
            // copies: a double edge closing with itself would be the
            // reverse of a triple edge, not of a double ear
            match self.find_bundle(v0, vl) {
                Some(bid) if !path_bundles.contains(&bid) => {
                    found = Some((nodes, path_bundles, bid));
                    break;
                }
                _ => last_open = (v0, vl),
            }
        }
        for b in tried_marks {
            self.tried[b as usize] = false;
        }
        let Some((nodes, path_bundles, closing)) = found else {
            let (v0, vl) = last_open;
            return Err(format!(
                "no double-edge path closes (last endpoints {v0} and {vl})"
            ));
        };
        let path: Vec<RecId> = path_bundles.iter().map(|&bid| self.remove_copy(bid)).collect();
        let closing_rec = self.remove_copy(closing);
        self.c += 1;
        self.steps_applied += 1;
        self.steps.push(ReductionStep::DoubleEdgePath { nodes, path, closing: closing_rec });
        Ok(true)
    }

    /// The unique inclusion-wise maximal path of double bundles through
    /// `seed`: growth from either end continues while the active node
    /// has exactly two distinct neighbors and one of them is unvisited.
    /// Returns (path nodes, path bundles); visited markers are restored.
    fn maximal_double_path(&mut self, seed: u32) -> (Vec<NodeId>, Vec<u32>) {
        let (u, v) = (self.bundles[seed as usize].u, self.bundles[seed as usize].v);
        self.nodes[u.index()].visited = true;
        self.nodes[v.index()].visited = true;
        let mut touched = vec![u, v];

        let grow = |state: &mut Self, mut x: NodeId, touched: &mut Vec<NodeId>| {
            let mut ext: Vec<(NodeId, u32)> = Vec::new();
            loop {
                if state.nodes[x.index()].incident.len() != 2 {
                    break;
                }
                let mut next = None;
                for &bid in state.nodes[x.index()].incident.iter() {
                    let y = state.bundles[bid as usize].other(x);
                    if !state.nodes[y.index()].visited {
                        next = Some((y, bid));
                    }
                }
                let Some((y, bid)) = next else {
                    break; // wrapped around onto the path
                };
                debug_assert_eq!(state.bundles[bid as usize].copies.len(), 2);
                state.nodes[y.index()].visited = true;
                touched.push(y);
                ext.push((y, bid));
                x = y;
            }
            ext
        };
        let left = grow(self, u, &mut touched);
        let right = grow(self, v, &mut touched);

        let mut nodes: Vec<NodeId> = left.iter().rev().map(|&(n, _)| n).collect();
        nodes.push(u);
        nodes.push(v);
        nodes.extend(right.iter().map(|&(n, _)| n));
        let mut path_bundles: Vec<u32> = left.iter().rev().map(|&(_, b)| b).collect();
        path_bundles.push(seed);
        path_bundles.extend(right.iter().map(|&(_, b)| b));
        for n in touched {
            self.nodes[n.index()].visited = false;
        }
        (nodes, path_bundles)
    }

    /// Consistency audit: degrees match bundle weights, list membership
    /// mirrors degrees and weights, visited markers are clear, and `c`
    /// equals the cycle contributions of the trace so far.
    pub fn audit(&self) -> Result<(), String> {
        let n = self.nodes.len();
        let mut deg = vec![0u32; n];
        let mut copies = 0usize;
        let mut bundles = 0usize;
        let mut weight_counts = [0usize; 5];
        let mut loop_count = 0usize;
        for (i, b) in self.bundles.iter().enumerate() {
            if !b.alive {
                continue;
            }
            bundles += 1;
            copies += b.copies.len();
            let w = b.copies.len();
            if b.is_loop() {
                deg[b.u.index()] += 2 * w as u32;
                loop_count += 1;
                if !self.loops.active().contains(&(i as u32)) {
                    return Err(format!("loop bundle {i} missing from L"));
                }
            } else {
                deg[b.u.index()] += w as u32;
                deg[b.v.index()] += w as u32;
                weight_counts[w] += 1;
                let listed = match w {
                    2 => self.e2.active().contains(&(i as u32)),
                    3 => self.e3.active().contains(&(i as u32)),
                    4 => self.e4.active().contains(&(i as u32)),
                    _ => true,
                };
                if !listed {
                    return Err(format!("bundle {i} of weight {w} missing from E{w}"));
                }
            }
        }
        if copies != self.live_copies || bundles != self.live_bundles {
            return Err(String::from("liveness counters out of sync"));
        }
        if weight_counts[2] != self.e2.live
            || weight_counts[3] != self.e3.live
            || weight_counts[4] != self.e4.live
            || loop_count != self.loops.live
        {
            return Err(String::from("bundle list live counts out of sync"));
        }
        let mut deg_counts = [0usize; 5];
        for i in 0..n {
            if deg[i] != self.nodes[i].degree {
                return Err(format!("degree mismatch at node {i}: {} vs {}", self.nodes[i].degree, deg[i]));
            }
            deg_counts[deg[i] as usize] += 1;
            if deg[i] == 2 && !self.v2.active().contains(&(i as u32)) {
                return Err(format!("degree-2 node {i} missing from V2"));
            }
            if self.nodes[i].visited {
                return Err(format!("visited marker left set at node {i}"));
            }
        }
        if deg_counts[2] != self.v2.live || deg_counts[4] != self.v4_count {
            return Err(String::from("degree list live counts out of sync"));
        }
        let contributed: usize = self.steps.iter().map(|s| s.cycles()).sum();
        if contributed != self.c {
            return Err(format!("c = {} but trace contributes {contributed}", self.c));
        }
        Ok(())
    }
}

/// Builds the initial reduction state for a connected graph whose
/// degrees all lie in {2, 4}. The precondition is the caller's
/// responsibility (see [`run`]); violations are contract errors.
pub fn init_state(g: &Multigraph) -> WorkState {
    init_state_with_policy(g, ChoicePolicy::FirstEntry)
}

pub fn init_state_with_policy(g: &Multigraph, policy: ChoicePolicy) -> WorkState {
    let n = g.node_count();
    let m = g.edge_count();
    let mut st = WorkState {
        bundles: Vec::with_capacity(m),
        nodes: vec![NodeState::default(); n],
        v2: LazyList::default(),
        v4_count: 0,
        e2: LazyList::default(),
        e3: LazyList::default(),
        e4: LazyList::default(),
        loops: LazyList::default(),
        tried: Vec::new(),
        live_copies: 0,
        live_nodes: n,
        live_bundles: 0,
        c: 0,
        // a run applies at most n + m steps and allocates at most one
        // merge record per resolve on top of the m leaves
        steps: Vec::with_capacity(n + m),
        arena: RecordArena { nodes: Vec::with_capacity(2 * m) },
        finished: false,
        steps_applied: 0,
        policy,
    };
    for v in g.nodes() {
        let d = g.degree(v);
        assert!(d == 2 || d == 4, "init_state precondition: degree {d} at node {v}");
    }
    // The edge list reads sequentially but lands on random node lines;
    // prefetching a batch of upcoming endpoints overlaps those misses.
    const LOOKAHEAD: usize = 32;
    for e in g.edge_ids() {
        let ahead = e.index() + LOOKAHEAD;
        if ahead < m {
            let (pu, pv) = g.endpoints(EdgeId(ahead as u32));
            prefetch(&st.nodes[pu.index()].degree);
            prefetch(&st.nodes[pv.index()].degree);
        }
        let (u, v) = g.endpoints(e);
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        let leaf = st.arena.leaf(e, (u, v));
        st.live_copies += 1;
        match st.find_bundle(u, v) {
            Some(bid) => {
                let w_old = st.bundles[bid as usize].copies.len();
                assert!(
                    w_old < 4 && !(u == v && w_old >= 2),
                    "init_state precondition: bundle weight exceeds the degree bound"
                );
                st.delist_bundle(bid, w_old);
                st.bundles[bid as usize].copies.push(leaf);
                st.enlist_bundle(bid, w_old + 1);
            }
            None => {
                st.new_bundle(u, v, leaf);
            }
        }
    }
    for v in g.nodes() {
        st.nodes[v.index()].degree = g.degree(v);
        match g.degree(v) {
            2 => {
                st.v2.push(v.0);
                st.v2.live += 1;
            }
            4 => st.v4_count += 1,
            _ => unreachable!(),
        }
    }
    st
}

/// Decides decomposability of `g` and computes its cycle number plus a
/// full reduction trace. Requires nothing of `g`; degree or
/// connectivity violations come back as `NotDecomposable` witnesses.
pub fn run(g: &Multigraph) -> DecompositionResult {
    run_with_policy(g, ChoicePolicy::FirstEntry)
}

pub fn run_with_policy(g: &Multigraph, policy: ChoicePolicy) -> DecompositionResult {
    if g.node_count() == 0 {
        return DecompositionResult::NotDecomposable { reason: String::from("empty graph") };
    }
    for v in g.nodes() {
        let d = g.degree(v);
        if d != 2 && d != 4 {
            return DecompositionResult::NotDecomposable {
                reason: format!("degree {d} at node {v}"),
            };
        }
    }
    if !g.is_connected() {
        return DecompositionResult::NotDecomposable { reason: String::from("disconnected") };
    }
    let mut st = init_state_with_policy(g, policy);
    while !st.finished {
        st.drain_easy();
        if st.finished {
            break;
        }
        match st.step_quadruple() {
            Ok(true) => continue,
            Ok(false) => {}
            Err(reason) => return DecompositionResult::NotDecomposable { reason },
        }
        if st.step_triple() {
            continue;
        }
        match st.step_double() {
            Ok(true) => continue,
            Ok(false) => {}
            Err(reason) => return DecompositionResult::NotDecomposable { reason },
        }
        return DecompositionResult::NotDecomposable {
            reason: String::from("no reduction step applicable (treewidth exceeds 2)"),
        };
    }
    let c = st.c;
    DecompositionResult::Decomposable { c, trace: st.into_trace() }
}

/// Cycle number of an arbitrary (possibly disconnected) graph: the sum
/// of the per-component results. Any failing component fails the whole
/// graph.
pub fn cycle_number(g: &Multigraph) -> Result<usize, String> {
    let mut total = 0;
    for (i, (comp, _, _)) in g.connected_components().iter().enumerate() {
        match run(comp) {
            DecompositionResult::Decomposable { c, .. } => total += c,
            DecompositionResult::NotDecomposable { reason } => {
                return Err(format!("component {i}: {reason}"));
            }
        }
    }
    Ok(total)
}
