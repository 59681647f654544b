//! Finite simple undirected graphs with canonical edge orientations.
//!
//! Every edge is stored once as an ordered pair `(u, v)` with `u < v`; the
//! ordering of vertex ids doubles as the canonical orientation used by
//! flows. Tori come with their grid embedding, which hole-freeness and the
//! annulus predicate rely on.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use crate::rational::ExactRational;
use crate::{Error, Result};

pub type Vertex = u32;
pub type Edge = (Vertex, Vertex);
pub type VertexSet = BTreeSet<Vertex>;
pub type EdgeSet = BTreeSet<Edge>;

/// A finite simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    adjacency: BTreeMap<Vertex, Vec<Vertex>>,
    edge_set: EdgeSet,
    torus: Option<(u32, u32)>,
}

/// Orients an unordered pair canonically.
pub fn canonical(u: Vertex, v: Vertex) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Builds a graph from explicit vertex and edge lists. Rejects
    /// self-loops, duplicate edges, and edges with undeclared endpoints.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let vset: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut edge_set = EdgeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::Format(format!("self-loop at vertex {u}")));
            }
            if !vset.contains(&u) || !vset.contains(&v) {
                return Err(Error::Format(format!("edge ({u},{v}) has undeclared endpoint")));
            }
            if !edge_set.insert(canonical(u, v)) {
                return Err(Error::Format(format!("duplicate edge ({u},{v})")));
            }
        }
        let mut adjacency: BTreeMap<Vertex, Vec<Vertex>> =
            vset.iter().map(|&v| (v, Vec::new())).collect();
        for &(u, v) in &edge_set {
            adjacency.get_mut(&u).unwrap().push(v);
            adjacency.get_mut(&v).unwrap().push(u);
        }
        for nbrs in adjacency.values_mut() {
            nbrs.sort_unstable();
        }
        Ok(Graph {
            vertices: vset.into_iter().collect(),
            edges: edge_set.iter().copied().collect(),
            adjacency,
            edge_set,
            torus: None,
        })
    }

    /// The 4-regular grid on `Z_w x Z_h` with wraparound, vertices indexed
    /// row-major (`v = y * w + x`). Requires `w, h >= 3` so the graph stays
    /// simple.
    pub fn torus(w: u32, h: u32) -> Result<Self> {
        if w < 3 || h < 3 {
            return Err(Error::Parameter(format!("torus needs w, h >= 3, got {w}x{h}")));
        }
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let v = y * w + x;
                let right = y * w + (x + 1) % w;
                let down = ((y + 1) % h) * w + x;
                edges.push(canonical(v, right));
                edges.push(canonical(v, down));
            }
        }
        let mut g = Graph::new(0..w * h, edges)?;
        g.torus = Some((w, h));
        Ok(g)
    }

    pub fn torus_dims(&self) -> Option<(u32, u32)> {
        self.torus
    }

    /// Row-major coordinates on a torus.
    pub fn torus_vertex(&self, x: u32, y: u32) -> Vertex {
        let (w, h) = self.torus.expect("not a torus");
        (y % h) * w + (x % w)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edges in canonical orientation, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_set.contains(&canonical(u, v))
    }

    pub fn neighbors(&self, v: Vertex) -> Result<&[Vertex]> {
        self.adjacency
            .get(&v)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownVertex(v))
    }

    pub fn check_vertices<'a>(&self, it: impl IntoIterator<Item = &'a Vertex>) -> Result<()> {
        for &v in it {
            if !self.has_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        Ok(())
    }

    /// `N^k(S)`: all vertices at graph distance between 1 and `k` from `S`.
    /// `S` itself is excluded.
    pub fn neighborhood(&self, set: &VertexSet, k: u32) -> Result<VertexSet> {
        if k == 0 {
            return Err(Error::Parameter("neighborhood radius must be >= 1".into()));
        }
        self.check_vertices(set)?;
        let mut seen: BTreeSet<Vertex> = set.clone();
        let mut frontier: Vec<Vertex> = set.iter().copied().collect();
        let mut out = VertexSet::new();
        for _ in 0..k {
            let mut next = Vec::new();
            for &v in &frontier {
                for &u in self.adjacency[&v].iter() {
                    if seen.insert(u) {
                        out.insert(u);
                        next.push(u);
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        Ok(out)
    }

    /// Vertices of `F` with at least one neighbor outside `F`.
    pub fn boundary(&self, f: &VertexSet) -> Result<VertexSet> {
        self.check_vertices(f)?;
        Ok(f.iter()
            .copied()
            .filter(|&v| self.adjacency[&v].iter().any(|u| !f.contains(u)))
            .collect())
    }

    /// `|boundary(F)| < epsilon * |F|`.
    pub fn is_folner(&self, f: &VertexSet, epsilon: &ExactRational) -> Result<bool> {
        if f.is_empty() {
            return Err(Error::Domain("Følner check on empty set".into()));
        }
        let b = self.boundary(f)?;
        let lhs = ExactRational::from_int(b.len() as i64);
        let rhs = epsilon * &ExactRational::from_int(f.len() as i64);
        Ok(lhs < rhs)
    }

    /// Connected components of the subgraph induced on `within`.
    pub fn components_within(&self, within: &VertexSet) -> Vec<VertexSet> {
        let mut unseen: BTreeSet<Vertex> = within.clone();
        let mut comps = Vec::new();
        while let Some(&start) = unseen.iter().next() {
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            unseen.remove(&start);
            comp.insert(start);
            while let Some(v) = queue.pop_front() {
                for &u in self.adjacency[&v].iter() {
                    if unseen.remove(&u) {
                        comp.insert(u);
                        queue.push_back(u);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// Connected components of the whole graph.
    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&self.vertices.iter().copied().collect())
    }

    pub fn is_connected_set(&self, set: &VertexSet) -> bool {
        if set.is_empty() {
            return false;
        }
        self.components_within(set).len() == 1
    }

    /// True iff the complement of `H` induces exactly one connected
    /// component, i.e. `H` encloses nothing. Only defined on the grid
    /// embedding of a torus.
    pub fn is_hole_free(&self, h: &VertexSet) -> Result<bool> {
        if self.torus.is_none() {
            return Err(Error::Domain(
                "hole-freeness is only defined for torus instances".into(),
            ));
        }
        self.check_vertices(h)?;
        if !self.is_connected_set(h) {
            return Err(Error::Domain("hole-freeness needs a connected set".into()));
        }
        if h.len() >= self.vertex_count() {
            return Err(Error::Domain("hole-freeness needs a proper subset".into()));
        }
        let complement: VertexSet = self
            .vertices
            .iter()
            .copied()
            .filter(|v| !h.contains(v))
            .collect();
        Ok(self.components_within(&complement).len() == 1)
    }

    /// True iff the induced subgraph on `N^2(H)` (the 2-annulus around `H`,
    /// excluding `H`) is connected. Preconditions: `H` connected, hole-free,
    /// proper subset of a torus.
    pub fn annulus_connected(&self, h: &VertexSet) -> Result<bool> {
        if !self.is_hole_free(h)? {
            return Err(Error::Domain("annulus check needs a hole-free set".into()));
        }
        let annulus = self.neighborhood(h, 2)?;
        Ok(self.is_connected_set(&annulus))
    }

    /// Shortest-path (BFS) distance between two vertex sets; `None` if they
    /// lie in different components.
    pub fn set_distance(&self, a: &VertexSet, b: &VertexSet) -> Option<u32> {
        if a.iter().any(|v| b.contains(v)) {
            return Some(0);
        }
        let mut dist: BTreeMap<Vertex, u32> = a.iter().map(|&v| (v, 0)).collect();
        let mut queue: VecDeque<Vertex> = a.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            for &u in self.adjacency[&v].iter() {
                if !dist.contains_key(&u) {
                    if b.contains(&u) {
                        return Some(d + 1);
                    }
                    dist.insert(u, d + 1);
                    queue.push_back(u);
                }
            }
        }
        None
    }

    /// Edges of the subgraph induced on `set`, canonical orientation.
    pub fn induced_edges(&self, set: &VertexSet) -> EdgeSet {
        let mut out = EdgeSet::new();
        for &v in set {
            for &u in self.adjacency[&v].iter() {
                if u > v && set.contains(&u) {
                    out.insert((v, u));
                }
            }
        }
        out
    }
}
