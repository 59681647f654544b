//! Combinatorial subroutines for the rounding pipeline: parity subgraphs,
//! edge-disjoint cycle decompositions of even graphs, and shortest cycle
//! search through a designated edge.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use crate::graph::{canonical, Edge, EdgeSet, Graph, Vertex, VertexSet};
use crate::{Error, Result};

/// A simple cycle as a vertex sequence; edge `i` runs from `vertices[i]` to
/// `vertices[(i + 1) % len]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedCycle {
    pub vertices: Vec<Vertex>,
}

impl OrientedCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| canonical(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.edges().any(|f| f == e)
    }

    /// Checks simplicity: distinct vertices, consecutive pairs adjacent in
    /// `graph`, length at least 3.
    pub fn is_simple_in(&self, graph: &Graph) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        let distinct: BTreeSet<Vertex> = self.vertices.iter().copied().collect();
        if distinct.len() != n {
            return false;
        }
        (0..n).all(|i| graph.has_edge(self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Shortest path between `s` and `t` inside the subgraph induced on `within`,
/// by breadth-first search expanding neighbors in ascending vertex order
/// (ties resolve lexicographically, making the result deterministic).
pub(crate) fn lex_bfs_path(graph: &Graph, within: &VertexSet, s: Vertex, t: Vertex) -> Option<Vec<Vertex>> {
    let mut pred: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut queue = VecDeque::from([s]);
    pred.insert(s, s);
    while let Some(v) = queue.pop_front() {
        if v == t {
            break;
        }
        for &u in graph.neighbors(v).ok()? {
            if within.contains(&u) && !pred.contains_key(&u) {
                pred.insert(u, v);
                queue.push_back(u);
            }
        }
    }
    if !pred.contains_key(&t) {
        return None;
    }
    let mut path = alloc::vec![t];
    let mut v = t;
    while v != s {
        v = pred[&v];
        path.push(v);
    }
    path.reverse();
    Some(path)
}

/// Returns an edge set within `s` in which every vertex of `p` has odd
/// degree and every other vertex of `s` has even degree.
///
/// Pairs up the vertices of `p` in ascending order and takes the symmetric
/// difference of shortest paths between the pairs, which is the iterative
/// form of the textbook induction (peel two odd vertices, recurse, XOR a
/// connecting path).
pub fn odd_parity_subgraph(graph: &Graph, s: &VertexSet, p: &VertexSet) -> Result<EdgeSet> {
    graph.check_vertices(s)?;
    if !p.is_subset(s) {
        return Err(Error::Infeasible("P must be a subset of S".into()));
    }
    if p.len() % 2 != 0 {
        return Err(Error::Infeasible(format!("|P| = {} is odd", p.len())));
    }
    if !p.is_empty() && !graph.is_connected_set(s) {
        return Err(Error::Infeasible("S must induce a connected subgraph".into()));
    }
    let odd: Vec<Vertex> = p.iter().copied().collect();
    let mut edges = EdgeSet::new();
    for pair in odd.chunks(2) {
        let path = lex_bfs_path(graph, s, pair[0], pair[1])
            .ok_or_else(|| Error::Infeasible("S is not connected".into()))?;
        for window in path.windows(2) {
            let e = canonical(window[0], window[1]);
            if !edges.remove(&e) {
                edges.insert(e);
            }
        }
    }
    Ok(edges)
}

fn degrees(edges: &EdgeSet) -> BTreeMap<Vertex, usize> {
    let mut deg: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &(u, v) in edges {
        *deg.entry(u).or_default() += 1;
        *deg.entry(v).or_default() += 1;
    }
    deg
}

/// Partitions an even edge set into edge-disjoint oriented cycles. The
/// orientation follows the traversal, which always leaves a vertex by its
/// least unused incident edge.
pub fn cycle_decompose(graph: &Graph, edges: &EdgeSet) -> Result<Vec<OrientedCycle>> {
    for &(u, v) in edges {
        if !graph.has_edge(u, v) {
            return Err(Error::Format(format!("({u},{v}) is not a graph edge")));
        }
    }
    for (v, d) in degrees(edges) {
        if d % 2 != 0 {
            return Err(Error::Infeasible(format!("vertex {v} has odd degree {d}")));
        }
    }
    let mut remaining: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
    for &(u, v) in edges {
        remaining.entry(u).or_default().insert(v);
        remaining.entry(v).or_default().insert(u);
    }
    let mut cycles = Vec::new();
    loop {
        let start = match remaining.iter().find(|(_, n)| !n.is_empty()) {
            Some((&v, _)) => v,
            None => break,
        };
        // walk until the start vertex repeats; even degrees guarantee the
        // walk can always continue and close
        let mut walk = alloc::vec![start];
        let mut at = start;
        loop {
            let next = *remaining[&at].iter().next().expect("even degree");
            remaining.get_mut(&at).unwrap().remove(&next);
            remaining.get_mut(&next).unwrap().remove(&at);
            if next == start {
                break;
            }
            // if the walk revisits a vertex, split off the enclosed cycle
            if let Some(pos) = walk.iter().position(|&v| v == next) {
                cycles.push(OrientedCycle { vertices: walk.split_off(pos) });
                walk.push(next);
                at = next;
                continue;
            }
            walk.push(next);
            at = next;
        }
        cycles.push(OrientedCycle { vertices: walk });
    }
    Ok(cycles)
}

/// Finds a minimum-length simple cycle through `e` using only `allowed`
/// edges: breadth-first search between the endpoints of `e` avoiding `e`
/// itself. Returns `None` when `e` is a bridge of the allowed subgraph.
pub fn find_cycle_through(graph: &Graph, e: Edge, allowed: &EdgeSet) -> Result<Option<OrientedCycle>> {
    if !allowed.contains(&e) {
        return Err(Error::Domain(format!("edge ({},{}) is not allowed", e.0, e.1)));
    }
    let (s, t) = e;
    let mut pred: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut queue = VecDeque::from([t]);
    pred.insert(t, t);
    'search: while let Some(v) = queue.pop_front() {
        for &u in graph.neighbors(v)? {
            let f = canonical(v, u);
            if f == e || !allowed.contains(&f) || pred.contains_key(&u) {
                continue;
            }
            pred.insert(u, v);
            if u == s {
                break 'search;
            }
            queue.push_back(u);
        }
    }
    if !pred.contains_key(&s) {
        return Ok(None);
    }
    // path t -> s plus the edge s -> t, oriented so the cycle begins with e
    let mut path = alloc::vec![s];
    let mut v = s;
    while v != t {
        v = pred[&v];
        path.push(v);
    }
    path.reverse(); // t ... s
    let n = path.len();
    path.rotate_left(n - 1); // s, t, ...
    Ok(Some(OrientedCycle { vertices: path }))
}
