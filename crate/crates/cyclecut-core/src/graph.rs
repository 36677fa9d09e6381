//! Multigraph representation with loops and parallel edges.
//!
//! Nodes and edges carry dense integer ids. Edge ids are assigned in
//! insertion order, so a decomposition can be stated as a partition of
//! the edge-id set. Loops are edges with equal endpoints and count 2
//! towards the degree of their node.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Dense node index in `[0, node_count)`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

/// Dense edge index in `[0, edge_count)`, assigned in insertion order.
/// Parallel edges have distinct ids.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected multigraph. Equal endpoints denote a loop.
///
/// Values are immutable once handed to an algorithm; the transformation
/// operations ([`subdivide`](Multigraph::subdivide),
/// [`resolve`](Multigraph::resolve)) return fresh graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    degree: Vec<u32>,
}

impl Multigraph {
    pub fn new(node_count: usize) -> Self {
        Multigraph {
            node_count,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); node_count],
            degree: vec![0; node_count],
        }
    }

    pub fn from_edges(node_count: usize, edges: &[(u32, u32)]) -> Self {
        let mut g = Multigraph::new(node_count);
        for &(u, v) in edges {
            g.add_edge(NodeId(u), NodeId(v));
        }
        g
    }

    /// Adds an edge (or loop) and returns its id. Panics when an
    /// endpoint is out of range.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> EdgeId {
        assert!(u.index() < self.node_count && v.index() < self.node_count);
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push((u, v));
        self.adjacency[u.index()].push((v, id));
        self.adjacency[v.index()].push((u, id));
        self.degree[u.index()] += 1;
        self.degree[v.index()] += 1;
        id
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count as u32).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e.index()]
    }

    #[inline]
    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (u, v) = self.edges[e.index()];
        u == v
    }

    /// Endpoint count at `v`; a loop contributes 2.
    #[inline]
    pub fn degree(&self, v: NodeId) -> u32 {
        self.degree[v.index()]
    }

    /// Incident (neighbor, edge) pairs; a loop at `v` appears twice.
    pub fn incident(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[v.index()]
    }

    pub fn degree_multiset(&self) -> Vec<u32> {
        let mut d = self.degree.clone();
        d.sort_unstable();
        d
    }

    /// Splits the graph into connected components. Each component comes
    /// with relabelings mapping its local node and edge ids back to the
    /// ids of `self`. A node without edges forms its own component.
    pub fn connected_components(&self) -> Vec<(Multigraph, Vec<NodeId>, Vec<EdgeId>)> {
        let mut comp_of = vec![usize::MAX; self.node_count];
        let mut comps: Vec<Vec<NodeId>> = Vec::new();
        let mut stack = Vec::new();
        for start in self.nodes() {
            if comp_of[start.index()] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = Vec::new();
            comp_of[start.index()] = id;
            stack.push(start);
            while let Some(v) = stack.pop() {
                members.push(v);
                for &(w, _) in self.incident(v) {
                    if comp_of[w.index()] == usize::MAX {
                        comp_of[w.index()] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }

        let mut local = vec![0u32; self.node_count];
        let mut out: Vec<(Multigraph, Vec<NodeId>, Vec<EdgeId>)> = comps
            .iter()
            .map(|members| {
                for (i, v) in members.iter().enumerate() {
                    local[v.index()] = i as u32;
                }
                (Multigraph::new(members.len()), members.clone(), Vec::new())
            })
            .collect();
        for e in self.edge_ids() {
            let (u, v) = self.endpoints(e);
            let c = comp_of[u.index()];
            out[c].0.add_edge(NodeId(local[u.index()]), NodeId(local[v.index()]));
            out[c].2.push(e);
        }
        out
    }

    /// Connectivity via union-find over the edge list, avoiding the
    /// component materialization of [`connected_components`]. Isolated
    /// nodes count as their own components.
    ///
    /// [`connected_components`]: Multigraph::connected_components
    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return false;
        }
        let mut parent: Vec<u32> = (0..self.node_count as u32).collect();
        fn root(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        let mut components = self.node_count;
        for &(u, v) in &self.edges {
            let (ru, rv) = (root(&mut parent, u.0), root(&mut parent, v.0));
            if ru != rv {
                parent[ru as usize] = rv;
                components -= 1;
            }
        }
        components == 1
    }

    /// Replaces edge `e = uw` by a path `u x w` through a fresh node.
    /// A loop at `u` turns into two parallel `u x` edges. Edge ids stay
    /// dense: the remaining edges keep their relative order and the two
    /// new edges are appended at the end.
    pub fn subdivide(&self, e: EdgeId) -> Result<Multigraph, String> {
        if e.index() >= self.edges.len() {
            return Err(format!("unknown edge id {e}"));
        }
        let (u, w) = self.endpoints(e);
        let mut g = Multigraph::new(self.node_count + 1);
        let x = NodeId(self.node_count as u32);
        for f in self.edge_ids() {
            if f != e {
                let (a, b) = self.endpoints(f);
                g.add_edge(a, b);
            }
        }
        g.add_edge(u, x);
        g.add_edge(x, w);
        Ok(g)
    }

    /// Suppresses the degree-2 node `v`, joining its two incident edge
    /// copies into one fresh edge between its (possibly equal)
    /// neighbors. The inverse of [`subdivide`](Multigraph::subdivide).
    pub fn resolve(&self, v: NodeId) -> Result<Multigraph, String> {
        if v.index() >= self.node_count {
            return Err(format!("unknown node id {v}"));
        }
        if self.degree(v) != 2 {
            return Err(format!("node {v} has degree {}, expected 2", self.degree(v)));
        }
        let inc = self.incident(v);
        if inc[0].1 == inc[1].1 {
            return Err(format!("node {v} carries a loop"));
        }
        if self.node_count < 2 {
            return Err(String::from("cannot resolve the last remaining node"));
        }
        let (a, ea) = inc[0];
        let (b, _) = inc[1];
        let mut g = Multigraph::new(self.node_count - 1);
        let relabel = |x: NodeId| {
            if x.0 > v.0 {
                NodeId(x.0 - 1)
            } else {
                x
            }
        };
        for f in self.edge_ids() {
            let (p, q) = self.endpoints(f);
            if p == v || q == v {
                continue;
            }
            g.add_edge(relabel(p), relabel(q));
        }
        let _ = ea;
        g.add_edge(relabel(a), relabel(b));
        Ok(g)
    }

    /// Emits the edge-list text format: `n m` followed by one `u v`
    /// line per edge in id order.
    pub fn serialize(&self) -> String {
        let mut s = format!("{} {}\n", self.node_count, self.edges.len());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{} {}\n", u.0, v.0));
        }
        s
    }
}

/// Parse failure for the edge-list format, with a 1-based line number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    MalformedHeader { line: usize },
    BadToken { line: usize, token: String },
    NodeOutOfRange { line: usize, index: u64, node_count: usize },
    WrongEdgeCount { expected: usize, found: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::MalformedHeader { line } => {
                write!(f, "line {line}: malformed header, expected \"n m\"")
            }
            ParseError::BadToken { line, token } => {
                write!(f, "line {line}: non-integer token {token:?}")
            }
            ParseError::NodeOutOfRange { line, index, node_count } => {
                write!(f, "line {line}: node index {index} not below n = {node_count}")
            }
            ParseError::WrongEdgeCount { expected, found } => {
                write!(f, "expected {expected} edge lines, found {found}")
            }
        }
    }
}

/// Parses the edge-list text format.
///
/// Lines starting with `#` are comments. The first data line is
/// `n m`; then exactly `m` lines `u v` with `0 <= u,v < n`. `u u` is a
/// loop; repeated lines are parallel edges. Edge ids follow the
/// data-line order.
pub fn parse_graph(text: &str) -> Result<Multigraph, ParseError> {
    let mut graph: Option<Multigraph> = None;
    let mut expected = 0usize;
    let mut found = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut nums = [0u64; 2];
        let mut count = 0;
        for tok in line.split_whitespace() {
            if count == 2 {
                count = 3;
                break;
            }
            nums[count] = tok.parse::<u64>().map_err(|_| ParseError::BadToken {
                line: line_no,
                token: String::from(tok),
            })?;
            count += 1;
        }
        match graph.as_mut() {
            None => {
                if count != 2 {
                    return Err(ParseError::MalformedHeader { line: line_no });
                }
                graph = Some(Multigraph::new(nums[0] as usize));
                expected = nums[1] as usize;
            }
            Some(g) => {
                if count != 2 {
                    return Err(ParseError::BadToken {
                        line: line_no,
                        token: String::from(line),
                    });
                }
                for &x in &nums {
                    if x >= g.node_count() as u64 {
                        return Err(ParseError::NodeOutOfRange {
                            line: line_no,
                            index: x,
                            node_count: g.node_count(),
                        });
                    }
                }
                if found == expected {
                    return Err(ParseError::WrongEdgeCount { expected, found: found + 1 });
                }
                g.add_edge(NodeId(nums[0] as u32), NodeId(nums[1] as u32));
                found += 1;
            }
        }
    }
    let g = graph.ok_or(ParseError::MalformedHeader { line: 1 })?;
    if found != expected {
        return Err(ParseError::WrongEdgeCount { expected, found });
    }
    Ok(g)
}
