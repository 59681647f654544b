//! Two-stage rounding of rational f-flows to integral f-flows along a
//! connected toast.
//!
//! Stage 1 ([`dyadic_round`]) makes every value dyadic while changing each
//! edge by less than 1: tiles are processed level by level, and each step
//! cancels the non-dyadic part of one edge by adding a small constant along
//! a cycle confined to the current tile. The constants are capped by
//! `2^-n` for a global step counter `n`, so the per-edge budget is the
//! geometric series.
//!
//! Stage 2 ([`integral_round`]) clears dyadic denominators from the largest
//! down, changing each edge by less than 2: per tile, the edges carrying
//! the top denominator `2^l` are completed to an even-degree graph by a
//! parity subgraph in the tile's free region, decomposed into cycles, and
//! shifted by `2^-l`.
//!
//! The composition ([`round_flow`]) changes each edge by less than 3.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::flow::{verify_f_flow, Flow, FlowProblem};
use crate::graph::{canonical, Edge, EdgeSet, Graph, Vertex, VertexSet};
use crate::parity::{cycle_decompose, find_cycle_through, odd_parity_subgraph};
use crate::rational::ExactRational;
use crate::toast::{stratify, validate_toast, TileId, Toast};
use crate::{Error, Result};

/// One cycle addition performed by either stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// 1 for the dyadic stage, 2 for the integral stage.
    pub stage: u8,
    /// Stratification level of the tile being processed (1-based), or 0
    /// for a root pass.
    pub level: u32,
    pub tile: TileId,
    /// Stage 1: the global step counter `n` (the constant obeys
    /// `|constant| < 2^-n`). Stage 2: the denominator exponent `l` of the
    /// pass (the constant is `2^-l`).
    pub step: u64,
    pub cycle: Vec<Vertex>,
    pub constant: ExactRational,
}

/// Record of a rounding run: every cycle addition plus per-edge cumulative
/// absolute perturbation for each stage.
#[derive(Debug, Clone, Default)]
pub struct RoundingTrace {
    pub steps: Vec<TraceStep>,
    pub stage1_change: BTreeMap<Edge, ExactRational>,
    pub stage2_change: BTreeMap<Edge, ExactRational>,
}

impl RoundingTrace {
    fn record(&mut self, step: TraceStep) {
        let change = match step.stage {
            1 => &mut self.stage1_change,
            _ => &mut self.stage2_change,
        };
        let n = step.cycle.len();
        let magnitude = step.constant.abs();
        for i in 0..n {
            let e = crate::graph::canonical(step.cycle[i], step.cycle[(i + 1) % n]);
            let entry = change.entry(e).or_insert_with(ExactRational::zero);
            *entry += &magnitude;
        }
        self.steps.push(step);
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

struct ToastStructure {
    /// (level, tile id) for every non-leaf tile, in processing order.
    processing: Vec<(u32, TileId)>,
    roots: Vec<TileId>,
    children: BTreeMap<TileId, Vec<TileId>>,
    free_regions: BTreeMap<TileId, VertexSet>,
}

fn prepare(graph: &Graph, toast: &Toast) -> Result<ToastStructure> {
    let violations = validate_toast(graph, toast)?;
    if !violations.is_empty() {
        return Err(Error::Domain(format!(
            "toast is invalid ({} violations, first: {:?})",
            violations.len(),
            violations[0]
        )));
    }
    let levels = stratify(toast)?;
    let mut processing = Vec::new();
    for (idx, level) in levels.levels.iter().enumerate().skip(1) {
        for &id in level {
            processing.push((idx as u32 + 1, id));
        }
    }
    let mut children = BTreeMap::new();
    let mut free_regions = BTreeMap::new();
    for t in toast.tiles() {
        children.insert(t.id, toast.children(t.id)?);
        free_regions.insert(t.id, toast.free_region(t.id)?);
    }
    Ok(ToastStructure {
        processing,
        roots: toast.roots(),
        children,
        free_regions,
    })
}

fn certified(tile: TileId, e: Edge, value: &ExactRational, what: &str) -> Error {
    Error::CertifiedFailure(format!(
        "{what} at tile {tile}, edge ({},{}) with value {value}",
        e.0, e.1
    ))
}

/// The dyadic target for a value `v` at step `n`: the multiple of `2^-m`
/// nearest to `v` for the smallest `m` that brings it strictly within
/// `2^-n`. Well defined (no ties) for non-dyadic `v`.
fn dyadic_target(v: &ExactRational, n: u64) -> ExactRational {
    let cap = ExactRational::pow2_inv(n);
    let within = |m: u64| (&v.round_to_dyadic(m) - v).abs() < cap;
    // the distance to the nearest multiple of 2^-m is non-increasing in m
    // (the grids refine), so the minimal m admits a binary search
    let (mut lo, mut hi) = (0u64, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if within(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    v.round_to_dyadic(lo)
}

struct Stage1<'a> {
    graph: &'a Graph,
    psi: Flow,
    trace: RoundingTrace,
    counter: u64,
}

impl Stage1<'_> {
    /// Rounds one edge: find a cycle through `e` in `allowed`, add the
    /// constant that makes `e` dyadic.
    fn round_edge(
        &mut self,
        tile: TileId,
        level: u32,
        e: Edge,
        allowed: &EdgeSet,
    ) -> Result<Vec<Vertex>> {
        let cycle = find_cycle_through(self.graph, e, allowed)?.ok_or_else(|| {
            certified(tile, e, self.psi.canonical_value(e), "no cycle through non-dyadic edge")
        })?;
        let value = self.psi.canonical_value(e).clone();
        let delta = dyadic_target(&value, self.counter) - &value;
        // the cycle starts with e traversed canonically, so the circuit
        // constant acts on e with positive sign
        debug_assert_eq!((cycle.vertices[0], cycle.vertices[1]), e);
        self.psi.add_circuit(&cycle.vertices, &delta);
        debug_assert!(self.psi.canonical_value(e).is_dyadic());
        let vertices = cycle.vertices.clone();
        self.trace.record(TraceStep {
            stage: 1,
            level,
            tile,
            step: self.counter,
            cycle: cycle.vertices,
            constant: delta,
        });
        self.counter += 1;
        Ok(vertices)
    }
}

/// Stage 1: rounds a rational-valued f-flow to a dyadic-valued f-flow with
/// the same divergence everywhere and `|psi - phi| < 1` on every edge.
pub fn dyadic_round(
    problem: &FlowProblem,
    toast: &Toast,
    phi: &Flow,
) -> Result<(Flow, RoundingTrace)> {
    let graph = &problem.graph;
    if !verify_f_flow(phi, problem)?.ok() {
        return Err(Error::Domain("input is not an f-flow for the problem".into()));
    }
    let structure = prepare(graph, toast)?;
    let mut stage = Stage1 {
        graph,
        psi: phi.clone(),
        trace: RoundingTrace::default(),
        counter: 1,
    };

    for &(level, tile) in &structure.processing {
        let free = &structure.free_regions[&tile];
        let tile_edges = graph.induced_edges(&toast.tile(tile)?.vertices);
        let mut child_edges = EdgeSet::new();
        for &c in &structure.children[&tile] {
            child_edges.extend(graph.induced_edges(&toast.tile(c)?.vertices));
        }
        let free_touching: EdgeSet = tile_edges
            .iter()
            .filter(|&&f| free.contains(&f.0) || free.contains(&f.1))
            .copied()
            .collect();
        // track the non-dyadic child edges incrementally: only edges on
        // the added cycle can change dyadicity
        let mut nondyadic: EdgeSet = child_edges
            .iter()
            .filter(|&&f| !stage.psi.canonical_value(f).is_dyadic())
            .copied()
            .collect();
        while let Some(&e) = nondyadic.iter().next() {
            let allowed: EdgeSet = free_touching.union(&nondyadic).copied().collect();
            let cycle = stage.round_edge(tile, level, e, &allowed)?;
            for i in 0..cycle.len() {
                let f = canonical(cycle[i], cycle[(i + 1) % cycle.len()]);
                if child_edges.contains(&f) && !stage.psi.canonical_value(f).is_dyadic() {
                    nondyadic.insert(f);
                } else {
                    nondyadic.remove(&f);
                }
            }
        }
    }

    // root pass: clear the free regions of the maximal tiles. Here the
    // allowed set is the non-dyadic edges alone: all edges of a root's
    // vertices are induced in it, so a bridge of the non-dyadic subgraph
    // would put a dyadic cut sum on a non-dyadic edge (the divergences are
    // integral), which is impossible. Restricting to non-dyadic edges also
    // makes the non-dyadic count strictly decrease, which free-region
    // edges (dyadic plus a non-dyadic constant) would not.
    for &root in &structure.roots {
        let tile_edges = graph.induced_edges(&toast.tile(root)?.vertices);
        let mut nondyadic: EdgeSet = tile_edges
            .iter()
            .filter(|&&f| !stage.psi.canonical_value(f).is_dyadic())
            .copied()
            .collect();
        while let Some(&e) = nondyadic.iter().next() {
            let cycle = stage.round_edge(root, 0, e, &nondyadic)?;
            for i in 0..cycle.len() {
                let f = canonical(cycle[i], cycle[(i + 1) % cycle.len()]);
                if tile_edges.contains(&f) && !stage.psi.canonical_value(f).is_dyadic() {
                    nondyadic.insert(f);
                } else {
                    nondyadic.remove(&f);
                }
            }
        }
    }

    let psi = stage.psi;
    if !psi.is_dyadic() {
        return Err(Error::CertifiedFailure("stage 1 left a non-dyadic edge".into()));
    }
    if !verify_f_flow(&psi, problem)?.ok() {
        return Err(Error::CertifiedFailure("stage 1 perturbed the divergence".into()));
    }
    let dist = psi.sup_distance(phi);
    if dist >= ExactRational::one() {
        return Err(Error::CertifiedFailure(format!("stage 1 moved an edge by {dist} >= 1")));
    }
    Ok((psi, stage.trace))
}

/// One stage-2 pass: completes the exponent-`l` edges to an even-degree
/// graph (via a parity subgraph on `free` when given), cycle decomposes,
/// and adds `2^-l` along every cycle. Returns every edge whose value was
/// changed.
fn stage2_pass(
    graph: &Graph,
    psi: &mut Flow,
    trace: &mut RoundingTrace,
    tile: TileId,
    level: u32,
    level_edges: &EdgeSet,
    free: Option<&VertexSet>,
    l: u64,
) -> Result<EdgeSet> {
    debug_assert!(!level_edges.is_empty());

    let mut union = level_edges.clone();
    if let Some(free) = free {
        let mut parity: BTreeMap<Vertex, usize> = BTreeMap::new();
        for &(u, v) in level_edges {
            for w in [u, v] {
                if free.contains(&w) {
                    *parity.entry(w).or_default() += 1;
                }
            }
        }
        let odd: VertexSet = parity
            .into_iter()
            .filter(|&(_, d)| d % 2 == 1)
            .map(|(v, _)| v)
            .collect();
        let h = odd_parity_subgraph(graph, free, &odd).map_err(|e| {
            Error::CertifiedFailure(format!("parity subgraph failed at tile {tile}: {e}"))
        })?;
        union.extend(h);
    }

    let cycles = cycle_decompose(graph, &union).map_err(|e| {
        Error::CertifiedFailure(format!("union graph at tile {tile} is not even: {e}"))
    })?;
    let constant = ExactRational::pow2_inv(l);
    for cycle in cycles {
        psi.add_circuit(&cycle.vertices, &constant);
        trace.record(TraceStep {
            stage: 2,
            level,
            tile,
            step: l,
            cycle: cycle.vertices,
            constant: constant.clone(),
        });
    }
    Ok(union)
}

/// Per-exponent index of the non-integral edges of a scope, kept current
/// across stage-2 passes so each pass only touches the edges it changed.
struct ExponentIndex {
    scope: EdgeSet,
    exponent_of: BTreeMap<Edge, u64>,
    by_exponent: BTreeMap<u64, EdgeSet>,
}

impl ExponentIndex {
    fn new(psi: &Flow, scope: EdgeSet) -> Result<Self> {
        let mut index = ExponentIndex {
            scope: scope.clone(),
            exponent_of: BTreeMap::new(),
            by_exponent: BTreeMap::new(),
        };
        for &e in &scope {
            index.reindex(psi, e)?;
        }
        Ok(index)
    }

    fn reindex(&mut self, psi: &Flow, e: Edge) -> Result<()> {
        if !self.scope.contains(&e) {
            return Ok(());
        }
        if let Some(old) = self.exponent_of.remove(&e) {
            if let Some(set) = self.by_exponent.get_mut(&old) {
                set.remove(&e);
                if set.is_empty() {
                    self.by_exponent.remove(&old);
                }
            }
        }
        let exp = psi
            .canonical_value(e)
            .denominator_exponent()
            .ok_or_else(|| Error::Domain(format!("edge ({},{}) is not dyadic", e.0, e.1)))?;
        if exp > 0 {
            self.exponent_of.insert(e, exp);
            self.by_exponent.entry(exp).or_default().insert(e);
        }
        Ok(())
    }

    /// The current top exponent and its edges, if any edge is non-integral.
    fn top(&self) -> Option<(u64, EdgeSet)> {
        self.by_exponent
            .iter()
            .next_back()
            .map(|(&l, edges)| (l, edges.clone()))
    }
}

/// Stage 2: rounds a dyadic-valued f-flow to an integral f-flow with the
/// same divergence everywhere and `|psi - phi| < 2` on every edge.
pub fn integral_round(
    problem: &FlowProblem,
    toast: &Toast,
    phi: &Flow,
) -> Result<(Flow, RoundingTrace)> {
    let graph = &problem.graph;
    if !phi.is_dyadic() {
        return Err(Error::Domain("stage 2 requires a dyadic-valued flow".into()));
    }
    if !verify_f_flow(phi, problem)?.ok() {
        return Err(Error::Domain("input is not an f-flow for the problem".into()));
    }
    let structure = prepare(graph, toast)?;
    let mut psi = phi.clone();
    let mut trace = RoundingTrace::default();

    for &(level, tile) in &structure.processing {
        let free = &structure.free_regions[&tile];
        let mut child_vertices = VertexSet::new();
        for &c in &structure.children[&tile] {
            child_vertices.extend(toast.tile(c)?.vertices.iter().copied());
        }
        // every edge incident to a child vertex; sibling tiles are
        // non-adjacent and children sit inside the tile, so these all lie
        // within the tile
        let scope: EdgeSet = graph
            .induced_edges(&toast.tile(tile)?.vertices)
            .into_iter()
            .filter(|&(u, v)| child_vertices.contains(&u) || child_vertices.contains(&v))
            .collect();
        let mut index = ExponentIndex::new(&psi, scope)?;
        while let Some((l, level_edges)) = index.top() {
            let changed =
                stage2_pass(graph, &mut psi, &mut trace, tile, level, &level_edges, Some(free), l)?;
            for e in changed {
                index.reindex(&psi, e)?;
            }
        }
    }

    // root pass: remaining non-integral edges have both endpoints in a
    // root's free region; at the component's top denominator every vertex
    // has even degree, so no parity subgraph is needed
    for &root in &structure.roots {
        let scope = graph.induced_edges(&toast.tile(root)?.vertices);
        let mut index = ExponentIndex::new(&psi, scope)?;
        while let Some((l, level_edges)) = index.top() {
            let changed =
                stage2_pass(graph, &mut psi, &mut trace, root, 0, &level_edges, None, l)?;
            for e in changed {
                index.reindex(&psi, e)?;
            }
        }
    }

    if !psi.is_integral() {
        return Err(Error::CertifiedFailure("stage 2 left a non-integral edge".into()));
    }
    if !verify_f_flow(&psi, problem)?.ok() {
        return Err(Error::CertifiedFailure("stage 2 perturbed the divergence".into()));
    }
    let dist = psi.sup_distance(phi);
    if dist >= ExactRational::from_int(2) {
        return Err(Error::CertifiedFailure(format!("stage 2 moved an edge by {dist} >= 2")));
    }
    Ok((psi, trace))
}

/// The full pipeline: rational -> dyadic -> integral, with
/// `|psi - phi| < 3` on every edge. When the problem carries a capacity
/// `c`, the output obeys `|psi(e)| <= c(e) + 2`.
pub fn round_flow(
    problem: &FlowProblem,
    toast: &Toast,
    phi: &Flow,
) -> Result<(Flow, RoundingTrace)> {
    let (dyadic, trace1) = dyadic_round(problem, toast, phi)?;
    let (integral, trace2) = integral_round(problem, toast, &dyadic)?;
    let dist = integral.sup_distance(phi);
    if dist >= ExactRational::from_int(3) {
        return Err(Error::CertifiedFailure(format!("rounding moved an edge by {dist} >= 3")));
    }
    if problem.capacity.is_some() {
        for (&e, v) in integral.iter() {
            let slack = ExactRational::from_int(problem.capacity_at(e).unwrap() as i64 + 2);
            if v.abs() > slack {
                return Err(Error::CertifiedFailure(format!(
                    "capacity slack exceeded on ({},{}): |{v}| > c + 2",
                    e.0, e.1
                )));
            }
        }
    }
    let mut trace = trace1;
    trace.steps.extend(trace2.steps);
    trace.stage2_change = trace2.stage2_change;
    Ok((integral, trace))
}
