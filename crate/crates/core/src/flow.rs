//! Antisymmetric edge flows with exact rational values.
//!
//! Values are stored on canonical orientations only; the value on a
//! reversed edge is the negation of the stored one, so antisymmetry holds
//! by construction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::graph::{canonical, Edge, Graph, Vertex};
use crate::rational::ExactRational;
use crate::{Error, Result};

/// A flow: one exact rational per canonical edge of its graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    values: BTreeMap<Edge, ExactRational>,
}

impl Flow {
    /// The zero flow on `graph`.
    pub fn zero(graph: &Graph) -> Self {
        Flow {
            values: graph
                .edges()
                .iter()
                .map(|&e| (e, ExactRational::zero()))
                .collect(),
        }
    }

    /// Builds a flow from explicit canonical-edge values; missing edges get
    /// value zero, unknown edges are rejected.
    pub fn from_values(graph: &Graph, values: impl IntoIterator<Item = (Edge, ExactRational)>) -> Result<Self> {
        let mut flow = Flow::zero(graph);
        for ((u, v), val) in values {
            if u >= v || !graph.has_edge(u, v) {
                return Err(Error::Format(format!("({u},{v}) is not a canonical edge of the graph")));
            }
            flow.values.insert((u, v), val);
        }
        Ok(flow)
    }

    /// Stored value on the canonical edge `(u, v)` with `u < v`.
    pub fn canonical_value(&self, e: Edge) -> &ExactRational {
        &self.values[&e]
    }

    /// Signed value in the direction `from -> to` (negated when the pair is
    /// reversed relative to the canonical orientation).
    pub fn directed_value(&self, from: Vertex, to: Vertex) -> ExactRational {
        let e = canonical(from, to);
        let v = self.values[&e].clone();
        if from < to {
            v
        } else {
            -v
        }
    }

    pub fn set_canonical(&mut self, e: Edge, value: ExactRational) {
        debug_assert!(self.values.contains_key(&e));
        self.values.insert(e, value);
    }

    /// Adds `delta` in the direction `from -> to`.
    pub fn add_directed(&mut self, from: Vertex, to: Vertex, delta: &ExactRational) {
        let e = canonical(from, to);
        let v = self.values.get_mut(&e).expect("edge in flow domain");
        if from < to {
            *v += delta;
        } else {
            *v -= delta;
        }
    }

    /// Adds a circuit of constant value `delta` along the oriented closed
    /// walk `cycle` (first vertex repeated at the end is optional).
    pub fn add_circuit(&mut self, cycle: &[Vertex], delta: &ExactRational) {
        let n = cycle.len();
        for i in 0..n {
            let from = cycle[i];
            let to = cycle[(i + 1) % n];
            if from == to {
                continue;
            }
            self.add_directed(from, to, delta);
        }
    }

    /// Net outflow at `x`: the sum of directed values on edges leaving `x`.
    pub fn divergence(&self, graph: &Graph, x: Vertex) -> Result<ExactRational> {
        let mut sum = ExactRational::zero();
        for &y in graph.neighbors(x)? {
            sum += &self.directed_value(x, y);
        }
        Ok(sum)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &ExactRational)> {
        self.values.iter()
    }

    pub fn is_integral(&self) -> bool {
        self.values.values().all(ExactRational::is_integral)
    }

    pub fn is_dyadic(&self) -> bool {
        self.values.values().all(ExactRational::is_dyadic)
    }

    /// Largest |value| over all edges.
    pub fn sup_norm(&self) -> ExactRational {
        self.values
            .values()
            .map(ExactRational::abs)
            .max()
            .unwrap_or_else(ExactRational::zero)
    }

    /// `max_e |self(e) - other(e)|`.
    pub fn sup_distance(&self, other: &Flow) -> ExactRational {
        self.values
            .iter()
            .map(|(e, v)| (v - other.canonical_value(*e)).abs())
            .max()
            .unwrap_or_else(ExactRational::zero)
    }
}

/// A flow instance: graph, integral demand, optional integral capacity.
#[derive(Debug, Clone)]
pub struct FlowProblem {
    pub graph: Graph,
    pub demand: BTreeMap<Vertex, i64>,
    pub capacity: Option<BTreeMap<Edge, u64>>,
}

impl FlowProblem {
    /// Builds a problem, requiring the demand to sum to zero on every
    /// connected component (necessary for any f-flow to exist).
    pub fn new(
        graph: Graph,
        demand: BTreeMap<Vertex, i64>,
        capacity: Option<BTreeMap<Edge, u64>>,
    ) -> Result<Self> {
        graph.check_vertices(demand.keys())?;
        if let Some(cap) = &capacity {
            for &(u, v) in cap.keys() {
                if u >= v || !graph.has_edge(u, v) {
                    return Err(Error::Format(format!(
                        "capacity on ({u},{v}) which is not a canonical edge"
                    )));
                }
            }
        }
        for comp in graph.components() {
            let total: i64 = comp.iter().map(|v| demand.get(v).copied().unwrap_or(0)).sum();
            if total != 0 {
                return Err(Error::Domain(format!(
                    "demand sums to {total} on a connected component; no f-flow can exist"
                )));
            }
        }
        Ok(FlowProblem { graph, demand, capacity })
    }

    pub fn demand_at(&self, v: Vertex) -> i64 {
        self.demand.get(&v).copied().unwrap_or(0)
    }

    pub fn capacity_at(&self, e: Edge) -> Option<u64> {
        self.capacity.as_ref().map(|c| c.get(&e).copied().unwrap_or(0))
    }
}

/// Outcome of checking a flow against a problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowReport {
    /// Vertices where divergence differs from the demand.
    pub violated_vertices: Vec<Vertex>,
    /// Edges where |value| exceeds the capacity.
    pub violated_edges: Vec<Edge>,
}

impl FlowReport {
    pub fn ok(&self) -> bool {
        self.violated_vertices.is_empty() && self.violated_edges.is_empty()
    }
}

/// Checks that `flow` is an f-flow for `problem`: divergence equals the
/// demand everywhere and, when a capacity is declared, `|value| <= capacity`
/// on every edge.
pub fn verify_f_flow(flow: &Flow, problem: &FlowProblem) -> Result<FlowReport> {
    let graph = &problem.graph;
    let domain_edges: Vec<Edge> = flow.iter().map(|(e, _)| *e).collect();
    if domain_edges != graph.edges() {
        return Err(Error::GraphMismatch);
    }
    let mut report = FlowReport {
        violated_vertices: Vec::new(),
        violated_edges: Vec::new(),
    };
    for &x in graph.vertices() {
        let div = flow.divergence(graph, x)?;
        if div != ExactRational::from_int(problem.demand_at(x)) {
            report.violated_vertices.push(x);
        }
    }
    if problem.capacity.is_some() {
        for (&e, v) in flow.iter() {
            let cap = problem.capacity_at(e).unwrap();
            if v.abs() > ExactRational::from_int(cap as i64) {
                report.violated_edges.push(e);
            }
        }
    }
    Ok(report)
}
