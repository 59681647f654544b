//! Ground-truth machinery for small instances: feasibility of capacitated
//! integral f-flows (max-flow with lower bounds), the lexicographically
//! least integral f-flow, exhaustive enumeration, and seeded random
//! instance generation with a known integral witness.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::flow::{Flow, FlowProblem};
use crate::graph::{canonical, Edge, Graph, Vertex, VertexSet};
use crate::parity::lex_bfs_path;
use crate::rational::ExactRational;
use crate::toast::{generate_torus_toast, rng_below, Toast};
use crate::{Error, Result};

/// A generated test instance: a flow problem together with a rational
/// f-flow `phi` and an integral f-flow `witness` that `phi` perturbs.
#[derive(Debug, Clone)]
pub struct InstanceBundle {
    pub problem: FlowProblem,
    pub toast: Toast,
    pub phi: Flow,
    pub witness: Flow,
    pub seed: u64,
}

/// Edmonds–Karp max flow on a small directed residual network.
struct MaxFlow {
    n: usize,
    // residual capacities, adjacency as (to, index into caps)
    to: Vec<usize>,
    cap: Vec<i64>,
    head: Vec<Vec<usize>>,
}

impl MaxFlow {
    fn new(n: usize) -> Self {
        MaxFlow {
            n,
            to: Vec::new(),
            cap: Vec::new(),
            head: vec![Vec::new(); n],
        }
    }

    /// Adds arc u->v with capacity c; returns the arc index (the reverse
    /// arc is at index + 1).
    fn add_arc(&mut self, u: usize, v: usize, c: i64) -> usize {
        let idx = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.head[u].push(idx);
        self.to.push(u);
        self.cap.push(0);
        self.head[v].push(idx + 1);
        idx
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            // BFS for a shortest augmenting path
            let mut prev_arc = vec![usize::MAX; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut queue = alloc::collections::VecDeque::new();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.head[u] {
                    let v = self.to[a];
                    if !seen[v] && self.cap[a] > 0 {
                        seen[v] = true;
                        prev_arc[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = i64::MAX;
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                bottleneck = bottleneck.min(self.cap[a]);
                v = self.to[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                self.cap[a] -= bottleneck;
                self.cap[a ^ 1] += bottleneck;
                v = self.to[a ^ 1];
            }
            total += bottleneck;
        }
    }
}

/// Integral flow feasibility with per-edge bounds `lo(e) <= x(e) <= hi(e)`
/// (on the canonical orientation) and exact divergence `f`. Returns a
/// satisfying assignment or `None`. Standard reduction: substitute
/// `x = lo + y` and route the induced excesses from a super-source.
fn feasible_with_bounds(
    graph: &Graph,
    demand: impl Fn(Vertex) -> i64,
    bounds: &BTreeMap<Edge, (i64, i64)>,
) -> Option<BTreeMap<Edge, i64>> {
    let index: BTreeMap<Vertex, usize> = graph
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let n = index.len();
    let source = n;
    let sink = n + 1;
    let mut net = MaxFlow::new(n + 2);

    // excess[v] = what must still leave v after the lower bounds are routed
    let mut excess: Vec<i64> = graph.vertices().iter().map(|&v| demand(v)).collect();
    let mut arcs = BTreeMap::new();
    for &e in graph.edges() {
        let (lo, hi) = bounds[&e];
        if lo > hi {
            return None;
        }
        excess[index[&e.0]] -= lo;
        excess[index[&e.1]] += lo;
        arcs.insert(e, net.add_arc(index[&e.0], index[&e.1], hi - lo));
    }
    let mut need = 0;
    for (i, &ex) in excess.iter().enumerate() {
        if ex > 0 {
            net.add_arc(source, i, ex);
            need += ex;
        } else if ex < 0 {
            net.add_arc(i, sink, -ex);
        }
    }
    if net.run(source, sink) < need {
        return None;
    }
    Some(
        arcs.into_iter()
            .map(|(e, a)| {
                let (lo, hi) = bounds[&e];
                // flow pushed through the arc = initial residual minus current
                (e, lo + (hi - lo - net.cap[a]))
            })
            .collect(),
    )
}

fn capacity_bounds(problem: &FlowProblem) -> Result<BTreeMap<Edge, (i64, i64)>> {
    if problem.capacity.is_none() {
        return Err(Error::Parameter("a capacity function is required".into()));
    }
    Ok(problem
        .graph
        .edges()
        .iter()
        .map(|&e| {
            let c = problem.capacity_at(e).unwrap() as i64;
            (e, (-c, c))
        })
        .collect())
}

fn flow_from_assignment(graph: &Graph, values: BTreeMap<Edge, i64>) -> Flow {
    Flow::from_values(
        graph,
        values
            .into_iter()
            .map(|(e, v)| (e, ExactRational::from_int(v))),
    )
    .expect("assignment is keyed by graph edges")
}

/// An integral f-flow with `|psi(e)| <= c(e)` on every edge, or `None` if
/// no such flow exists.
pub fn feasible_integral_flow(problem: &FlowProblem) -> Result<Option<Flow>> {
    let bounds = capacity_bounds(problem)?;
    Ok(feasible_with_bounds(&problem.graph, |v| problem.demand_at(v), &bounds)
        .map(|vals| flow_from_assignment(&problem.graph, vals)))
}

/// The integral f-flow bounded by the capacity whose value vector, read in
/// canonical edge order, is lexicographically least under integer order.
/// `None` if infeasible. Fixes edges one at a time, ascending from `-c(e)`.
pub fn lex_least_integral_flow(problem: &FlowProblem) -> Result<Option<Flow>> {
    let graph = &problem.graph;
    let mut bounds = capacity_bounds(problem)?;
    if feasible_with_bounds(graph, |v| problem.demand_at(v), &bounds).is_none() {
        return Ok(None);
    }
    for &e in graph.edges() {
        let (lo, hi) = bounds[&e];
        for v in lo..=hi {
            bounds.insert(e, (v, v));
            if feasible_with_bounds(graph, |w| problem.demand_at(w), &bounds).is_some() {
                break;
            }
            // v = hi must succeed: the previous state was feasible
            debug_assert!(v < hi);
        }
    }
    let values = bounds.into_iter().map(|(e, (lo, _))| (e, lo)).collect();
    Ok(Some(flow_from_assignment(graph, values)))
}

/// Every integral f-flow with all `|value| <= bound`, by exhaustive edge
/// labeling with divergence pruning. Guarded to at most 12 edges.
pub fn enumerate_integral_flows(problem: &FlowProblem, bound: i64) -> Result<Vec<Flow>> {
    let graph = &problem.graph;
    if graph.edge_count() > 12 {
        return Err(Error::Parameter(format!(
            "enumeration is limited to 12 edges (got {})",
            graph.edge_count()
        )));
    }
    if bound < 0 {
        return Err(Error::Parameter("bound must be nonnegative".into()));
    }
    let edges: Vec<Edge> = graph.edges().to_vec();
    // how many of a vertex's incident edges appear at position >= i
    let mut remaining: Vec<BTreeMap<Vertex, i64>> = vec![BTreeMap::new(); edges.len() + 1];
    for i in (0..edges.len()).rev() {
        let mut m = remaining[i + 1].clone();
        *m.entry(edges[i].0).or_default() += 1;
        *m.entry(edges[i].1).or_default() += 1;
        remaining[i] = m;
    }

    let mut out = Vec::new();
    let mut values: Vec<i64> = Vec::with_capacity(edges.len());
    let mut div: BTreeMap<Vertex, i64> =
        graph.vertices().iter().map(|&v| (v, 0)).collect();

    fn rec(
        edges: &[Edge],
        remaining: &[BTreeMap<Vertex, i64>],
        bound: i64,
        demand: &dyn Fn(Vertex) -> i64,
        values: &mut Vec<i64>,
        div: &mut BTreeMap<Vertex, i64>,
        out: &mut Vec<BTreeMap<Edge, i64>>,
    ) {
        let i = values.len();
        // prune: a vertex with no unassigned incident edges must already
        // meet its demand, and others must be reachable within the bound
        for (&v, &d) in div.iter() {
            let rem = remaining[i].get(&v).copied().unwrap_or(0);
            if (demand(v) - d).abs() > rem * bound {
                return;
            }
        }
        if i == edges.len() {
            out.push(edges.iter().copied().zip(values.iter().copied()).collect());
            return;
        }
        let (u, w) = edges[i];
        for x in -bound..=bound {
            values.push(x);
            *div.get_mut(&u).unwrap() += x;
            *div.get_mut(&w).unwrap() -= x;
            rec(edges, remaining, bound, demand, values, div, out);
            values.pop();
            *div.get_mut(&u).unwrap() -= x;
            *div.get_mut(&w).unwrap() += x;
        }
    }

    let mut raw = Vec::new();
    rec(
        &edges,
        &remaining,
        bound,
        &|v| problem.demand_at(v),
        &mut values,
        &mut div,
        &mut raw,
    );
    for vals in raw {
        out.push(flow_from_assignment(graph, vals));
    }
    Ok(out)
}

/// Adds one unit of flow along the lexicographic shortest path from `s`
/// to `t`.
fn route_unit(graph: &Graph, flow: &mut Flow, s: Vertex, t: Vertex) {
    let all: VertexSet = graph.vertices().iter().copied().collect();
    let path = lex_bfs_path(graph, &all, s, t).expect("graph component is connected");
    let one = ExactRational::one();
    for pair in path.windows(2) {
        flow.add_directed(pair[0], pair[1], &one);
    }
}

/// A random rectangle circuit on the torus, as a vertex cycle.
fn random_rectangle(graph: &Graph, rng: &mut ChaCha8Rng) -> Vec<Vertex> {
    let (tw, th) = graph.torus_dims().expect("instance graphs are tori");
    let x = rng_below(rng, tw);
    let y = rng_below(rng, th);
    let w = 1 + rng_below(rng, tw - 2);
    let h = 1 + rng_below(rng, th - 2);
    let mut cyc = Vec::with_capacity(2 * (w + h) as usize);
    for dx in 0..w {
        cyc.push(graph.torus_vertex(x + dx, y));
    }
    for dy in 0..h {
        cyc.push(graph.torus_vertex(x + w, y + dy));
    }
    for dx in (1..=w).rev() {
        cyc.push(graph.torus_vertex(x + dx, y + h));
    }
    for dy in (1..=h).rev() {
        cyc.push(graph.torus_vertex(x, y + dy));
    }
    cyc
}

/// Builds a seeded instance on `torus(w, h)`: a toast from
/// [`generate_torus_toast`], a demand with `|f| <= 2` summing to zero, an
/// integral witness routing the demand along shortest paths, and `phi` =
/// witness plus `circuit_count` random rational circuits with denominators
/// drawn from `denominators` and magnitudes below 1.
#[allow(clippy::too_many_arguments)]
pub fn random_instance(
    w: u32,
    h: u32,
    base: u32,
    factor: u32,
    margin: u32,
    circuit_count: u32,
    denominators: &[u64],
    seed: u64,
) -> Result<InstanceBundle> {
    let graph = Graph::torus(w, h)?;
    let toast = generate_torus_toast(w, h, base, factor, margin, seed)?;
    random_instance_with_toast(graph, toast, circuit_count, denominators, seed)
}

/// As [`random_instance`], but over a caller-supplied torus graph and
/// toast (e.g. tori too small for the toast generator's margins).
pub fn random_instance_with_toast(
    graph: Graph,
    toast: Toast,
    circuit_count: u32,
    denominators: &[u64],
    seed: u64,
) -> Result<InstanceBundle> {
    if denominators.is_empty() {
        return Err(Error::Parameter("denominators must be non-empty".into()));
    }
    if denominators.iter().any(|&q| q < 2) {
        return Err(Error::Parameter("denominators must be at least 2".into()));
    }
    if graph.torus_dims().is_none() {
        return Err(Error::Parameter("instance graphs must be tori".into()));
    }
    // derive an independent stream so toast generation and perturbation
    // don't interact
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);

    let n = graph.vertex_count() as u32;
    let pair_count = rng_below(&mut rng, n / 8 + 1);
    let mut demand: BTreeMap<Vertex, i64> = BTreeMap::new();
    let mut witness = Flow::zero(&graph);
    for _ in 0..pair_count {
        let s = rng_below(&mut rng, n);
        let t = rng_below(&mut rng, n);
        if s == t
            || demand.get(&s).copied().unwrap_or(0) >= 2
            || demand.get(&t).copied().unwrap_or(0) <= -2
        {
            continue;
        }
        *demand.entry(s).or_default() += 1;
        *demand.entry(t).or_default() -= 1;
        route_unit(&graph, &mut witness, s, t);
    }
    demand.retain(|_, f| *f != 0);

    let mut phi = witness.clone();
    for _ in 0..circuit_count {
        let cyc = random_rectangle(&graph, &mut rng);
        let q = denominators[rng_below(&mut rng, denominators.len() as u32) as usize];
        let p = 1 + rng_below(&mut rng, q as u32 - 1) as i64;
        let sign = if rng_below(&mut rng, 2) == 0 { 1 } else { -1 };
        phi.add_circuit(&cyc, &ExactRational::new(sign * p, q as i64));
    }

    let problem = FlowProblem::new(graph, demand, None)?;
    debug_assert!(crate::flow::verify_f_flow(&witness, &problem)?.ok());
    debug_assert!(crate::flow::verify_f_flow(&phi, &problem)?.ok());
    Ok(InstanceBundle {
        problem,
        toast,
        phi,
        witness,
        seed,
    })
}

/// All connected labeled graphs on the vertex set `{0, .., n-1}` with at
/// most `max_edges` edges. Ground truth for the exhaustive suites.
pub fn connected_labeled_graphs(n: u32, max_edges: usize) -> Vec<Graph> {
    let vertices: Vec<Vertex> = (0..n).collect();
    let mut all_pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            all_pairs.push((u, v));
        }
    }
    let mut out = Vec::new();
    let m = all_pairs.len();
    for mask in 0u64..(1 << m) {
        if (mask.count_ones() as usize) > max_edges {
            continue;
        }
        let edges: Vec<Edge> = (0..m)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| all_pairs[i])
            .collect();
        let graph = Graph::new(vertices.clone(), edges).unwrap();
        if graph.vertex_count() > 0 && graph.components().len() == 1 {
            out.push(graph);
        }
    }
    out
}

/// All demand vectors with entries in `[-limit, limit]` summing to zero.
pub fn zero_sum_demands(vertices: &[Vertex], limit: i64) -> Vec<BTreeMap<Vertex, i64>> {
    let mut out = vec![BTreeMap::new()];
    for &v in vertices {
        let mut next = Vec::new();
        for partial in out {
            for x in -limit..=limit {
                let mut d = partial.clone();
                if x != 0 {
                    d.insert(v, x);
                }
                next.push(d);
            }
        }
        out = next;
    }
    out.into_iter()
        .filter(|d| d.values().sum::<i64>() == 0)
        .collect()
}

/// Bridge test by exhaustive reachability, used as an oracle for
/// `find_cycle_through`: `e` is a bridge of the subgraph spanned by
/// `allowed` iff removing it disconnects its endpoints within that
/// subgraph.
pub fn is_bridge(graph: &Graph, e: Edge, allowed: &BTreeSet<Edge>) -> bool {
    let e = canonical(e.0, e.1);
    if !allowed.contains(&e) {
        return true;
    }
    let mut seen = VertexSet::new();
    let mut stack = vec![e.0];
    seen.insert(e.0);
    while let Some(u) = stack.pop() {
        if u == e.1 {
            return false;
        }
        for &v in graph.neighbors(u).unwrap() {
            let f = canonical(u, v);
            if f != e && allowed.contains(&f) && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    true
}
