//! Equidecomposition of subsets of a discrete torus under the translation
//! action, driven by a bounded integral flow.
//!
//! The pipeline mirrors the positive direction of the underlying result:
//! a piecewise-translation bijection from A onto B induces an integral
//! (χ_A − χ_B)-flow on the Schreier graph ([`flow_from_bijection`]); any
//! bounded integral flow with that divergence can in turn be converted
//! back into an equidecomposition over a Følner tiling
//! ([`equidecompose`]), by realizing the tile-aggregated flow through
//! point transfers and matching lexicographically within tiles.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::flow::Flow;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::rational::ExactRational;
use crate::{Error, Result};

/// The translation action of Z_w x Z_h on the discrete torus; its Schreier
/// graph under the four unit translations is `Graph::torus(w, h)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusAction {
    pub width: u32,
    pub height: u32,
}

/// A translation vector, reduced to `0..w` and `0..h`.
pub type Translation = (u32, u32);

impl TorusAction {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(Error::Parameter("torus dimensions must be at least 3".into()));
        }
        Ok(TorusAction { width, height })
    }

    pub fn graph(&self) -> Graph {
        Graph::torus(self.width, self.height).expect("dimensions validated")
    }

    pub fn coords(&self, v: Vertex) -> (u32, u32) {
        (v % self.width, v / self.width)
    }

    pub fn vertex(&self, x: u32, y: u32) -> Vertex {
        (y % self.height) * self.width + (x % self.width)
    }

    pub fn translate(&self, v: Vertex, gamma: Translation) -> Vertex {
        let (x, y) = self.coords(v);
        self.vertex(x + gamma.0 % self.width, y + gamma.1 % self.height)
    }

    /// The translation carrying `from` to `to`.
    pub fn translation_between(&self, from: Vertex, to: Vertex) -> Translation {
        let (fx, fy) = self.coords(from);
        let (tx, ty) = self.coords(to);
        (
            (tx + self.width - fx) % self.width,
            (ty + self.height - fy) % self.height,
        )
    }

    /// Word length of a translation in the unit generators (wrapping
    /// shortest way in each coordinate).
    pub fn word_length(&self, gamma: Translation) -> u32 {
        gamma.0.min(self.width - gamma.0) + gamma.1.min(self.height - gamma.1)
    }
}

/// A partition of the torus vertices into Følner sets.
#[derive(Debug, Clone)]
pub struct Tiling {
    pub tiles: Vec<VertexSet>,
    pub epsilon: ExactRational,
    /// Square side when the tiling is a grid of squares.
    pub side: Option<u32>,
}

/// One piece of an equidecomposition: a set of source vertices all moved
/// by the same translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub gamma: Translation,
    pub vertices: VertexSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Equidecomposition {
    pub pieces: Vec<Piece>,
}

impl Equidecomposition {
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn source_size(&self) -> usize {
        self.pieces.iter().map(|p| p.vertices.len()).sum()
    }
}

/// Outcome of a uniformity or equidecomposition check.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub issues: Vec<String>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks `|A ∩ T| >= epsilon * |T|` on every tile of the tiling. This is
/// the operative finite uniformity condition: the construction only uses
/// uniformity on the tiles of the chosen tiling.
pub fn check_uniform(
    action: &TorusAction,
    a: &VertexSet,
    tiling: &Tiling,
    epsilon: &ExactRational,
) -> Result<CheckReport> {
    let graph = action.graph();
    graph.check_vertices(a)?;
    let mut report = CheckReport::default();
    for (i, tile) in tiling.tiles.iter().enumerate() {
        let hit = tile.intersection(a).count() as i64;
        let need = epsilon * &ExactRational::from_int(tile.len() as i64);
        if ExactRational::from_int(hit) < need {
            report
                .issues
                .push(format!("tile {i}: |A ∩ T| = {hit} < {epsilon}·|T| = {need}"));
        }
    }
    Ok(report)
}

/// Partitions the torus into s×s squares for the minimal common divisor
/// side `s >= 3` with `(4s−4)/s² < epsilon` (the internal boundary bound;
/// for s <= 2 every vertex is a boundary vertex and the formula does not
/// describe the square, so such sides are not considered).
pub fn folner_tiling(action: &TorusAction, epsilon: &ExactRational) -> Result<Tiling> {
    let (w, h) = (action.width, action.height);
    let side = (3..=w.min(h))
        .filter(|s| w % s == 0 && h % s == 0)
        .find(|&s| {
            let boundary = ExactRational::from_int(4 * s as i64 - 4);
            boundary < epsilon * &ExactRational::from_int((s as i64) * (s as i64))
        })
        .ok_or_else(|| {
            Error::Parameter(format!(
                "no common divisor side of {w}x{h} satisfies (4s-4)/s^2 < {epsilon}; \
                 use larger dimensions or a larger epsilon"
            ))
        })?;
    let mut tiles = Vec::new();
    for ty in 0..h / side {
        for tx in 0..w / side {
            let mut tile = VertexSet::new();
            for dy in 0..side {
                for dx in 0..side {
                    tile.insert(action.vertex(tx * side + dx, ty * side + dy));
                }
            }
            tiles.push(tile);
        }
    }
    Ok(Tiling {
        tiles,
        epsilon: epsilon.clone(),
        side: Some(side),
    })
}

/// A shortest generator path from `v` to `translate(v, gamma)`: wrap the
/// short way horizontally, then vertically.
fn generator_path(action: &TorusAction, v: Vertex, gamma: Translation) -> Vec<Vertex> {
    let (w, h) = (action.width, action.height);
    let (mut x, mut y) = action.coords(v);
    let mut path = vec![action.vertex(x, y)];
    let (dx, step_x) = if gamma.0 <= w - gamma.0 {
        (gamma.0, 1)
    } else {
        (w - gamma.0, w - 1) // step -1 mod w
    };
    for _ in 0..dx {
        x = (x + step_x) % w;
        path.push(action.vertex(x, y));
    }
    let (dy, step_y) = if gamma.1 <= h - gamma.1 {
        (gamma.1, 1)
    } else {
        (h - gamma.1, h - 1)
    };
    for _ in 0..dy {
        y = (y + step_y) % h;
        path.push(action.vertex(x, y));
    }
    path
}

/// Routes one unit of flow from every source vertex of every piece to its
/// translated image, along shortest generator paths. The result is an
/// integral (χ_A − χ_B)-flow; the returned bound is the a-priori sup-norm
/// estimate `piece count × max word length`.
pub fn flow_from_bijection(
    action: &TorusAction,
    pieces: &Equidecomposition,
) -> Result<(Flow, u64)> {
    let graph = action.graph();
    let mut flow = Flow::zero(&graph);
    let one = ExactRational::one();
    let mut max_word = 0u64;
    let mut seen = VertexSet::new();
    for piece in &pieces.pieces {
        graph.check_vertices(&piece.vertices)?;
        for &v in &piece.vertices {
            if !seen.insert(v) {
                return Err(Error::Domain(format!("vertex {v} appears in two pieces")));
            }
            let path = generator_path(action, v, piece.gamma);
            for pair in path.windows(2) {
                flow.add_directed(pair[0], pair[1], &one);
            }
        }
        max_word = max_word.max(action.word_length(piece.gamma) as u64);
    }
    Ok((flow, pieces.piece_count() as u64 * max_word))
}

/// Verifies that the pieces partition `A` and their translated images
/// partition `B`.
pub fn verify_equidecomposition(
    action: &TorusAction,
    a: &VertexSet,
    b: &VertexSet,
    pieces: &Equidecomposition,
) -> CheckReport {
    let mut report = CheckReport::default();
    let mut sources = VertexSet::new();
    let mut targets = VertexSet::new();
    for (i, piece) in pieces.pieces.iter().enumerate() {
        for &v in &piece.vertices {
            if !sources.insert(v) {
                report.issues.push(format!("source vertex {v} duplicated (piece {i})"));
            }
            let t = action.translate(v, piece.gamma);
            if !targets.insert(t) {
                report.issues.push(format!("target vertex {t} duplicated (piece {i})"));
            }
        }
    }
    for &v in sources.difference(a) {
        report.issues.push(format!("source vertex {v} is not in A"));
    }
    for &v in a.difference(&sources) {
        report.issues.push(format!("A vertex {v} is not covered"));
    }
    for &v in targets.difference(b) {
        report.issues.push(format!("target vertex {v} is not in B"));
    }
    for &v in b.difference(&targets) {
        report.issues.push(format!("B vertex {v} is not covered"));
    }
    report
}

/// A deterministic starting bijection from A onto B, as an
/// equidecomposition: points are matched within their own tile first
/// (ascending), and the leftovers are paired across tiles in ascending
/// order. Matching within tiles first keeps the induced flow's aggregate
/// tile-boundary mass small, which is what [`equidecompose`] consumes.
pub fn matched_bijection(
    action: &TorusAction,
    tiling: &Tiling,
    a: &VertexSet,
    b: &VertexSet,
) -> Result<Equidecomposition> {
    if a.len() != b.len() {
        return Err(Error::Infeasible(format!(
            "|A| = {} but |B| = {}; no bijection exists",
            a.len(),
            b.len()
        )));
    }
    let mut leftover_a: Vec<Vertex> = Vec::new();
    let mut leftover_b: Vec<Vertex> = Vec::new();
    let mut by_gamma: BTreeMap<Translation, VertexSet> = BTreeMap::new();
    let assign = |x: Vertex, t: Vertex, by_gamma: &mut BTreeMap<Translation, VertexSet>| {
        by_gamma
            .entry(action.translation_between(x, t))
            .or_default()
            .insert(x);
    };
    for tile in &tiling.tiles {
        let xs: Vec<Vertex> = tile.intersection(a).copied().collect();
        let ts: Vec<Vertex> = tile.intersection(b).copied().collect();
        let paired = xs.len().min(ts.len());
        for i in 0..paired {
            assign(xs[i], ts[i], &mut by_gamma);
        }
        leftover_a.extend(&xs[paired..]);
        leftover_b.extend(&ts[paired..]);
    }
    // pair each leftover source with the nearest remaining target
    // (ties broken by vertex order), keeping displacements short when
    // the per-tile imbalance is locally compensating
    leftover_a.sort_unstable();
    leftover_b.sort_unstable();
    for x in leftover_a {
        let (i, _) = leftover_b
            .iter()
            .enumerate()
            .min_by_key(|(_, &t)| (action.word_length(action.translation_between(x, t)), t))
            .expect("equal-size sets leave equal leftovers");
        let t = leftover_b.remove(i);
        assign(x, t, &mut by_gamma);
    }
    Ok(Equidecomposition {
        pieces: by_gamma
            .into_iter()
            .map(|(gamma, vertices)| Piece { gamma, vertices })
            .collect(),
    })
}

/// Extracts an equidecomposition from A onto B out of an integral
/// (χ_A − χ_B)-flow `psi`, over the given tiling.
///
/// The flow is aggregated over tile boundaries: `ψ(T,S)` sums `psi` over
/// edges from T to S. Each tile must hold enough of A and of B to cover
/// its aggregate boundary flow; then for every positive `ψ(T,S)` that many
/// lexicographically-least A-points of T are earmarked for S, after which
/// every tile holds exactly `|B ∩ T|` points and a within-tile
/// lexicographic matching finishes the bijection. Pieces are grouped by
/// translation vector.
pub fn equidecompose(
    action: &TorusAction,
    a: &VertexSet,
    b: &VertexSet,
    tiling: &Tiling,
    psi: &Flow,
) -> Result<Equidecomposition> {
    let graph = action.graph();
    graph.check_vertices(a)?;
    graph.check_vertices(b)?;
    if !psi.is_integral() {
        return Err(Error::Domain("psi must be integral".into()));
    }
    // divergence must be exactly χ_A − χ_B
    for &v in graph.vertices() {
        let want = i64::from(a.contains(&v)) - i64::from(b.contains(&v));
        if psi.divergence(&graph, v)? != ExactRational::from_int(want) {
            return Err(Error::Domain(format!(
                "psi divergence at vertex {v} differs from χ_A − χ_B"
            )));
        }
    }

    let mut tile_of: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, tile) in tiling.tiles.iter().enumerate() {
        for &v in tile {
            if tile_of.insert(v, i).is_some() {
                return Err(Error::Domain(format!("tiling tiles overlap at vertex {v}")));
            }
        }
    }
    if tile_of.len() != graph.vertex_count() {
        return Err(Error::Domain("tiling does not cover the vertex set".into()));
    }

    // aggregate boundary flow between adjacent tiles
    let mut aggregate: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for (&(u, v), value) in psi.iter() {
        let (tu, tv) = (tile_of[&u], tile_of[&v]);
        if tu == tv || value.is_zero() {
            continue;
        }
        let x: i64 = value
            .numerator()
            .try_into()
            .map_err(|_| Error::Domain("flow value exceeds i64".into()))?;
        *aggregate.entry((tu, tv)).or_default() += x;
        *aggregate.entry((tv, tu)).or_default() -= x;
    }

    // precondition: each tile's A- and B-mass covers its aggregate flow
    let mut out_mass: Vec<i64> = vec![0; tiling.tiles.len()];
    for (&(t, _), &x) in &aggregate {
        out_mass[t] += x.abs();
    }
    for (i, tile) in tiling.tiles.iter().enumerate() {
        let a_count = tile.intersection(a).count() as i64;
        let b_count = tile.intersection(b).count() as i64;
        if a_count < out_mass[i] || b_count < out_mass[i] {
            return Err(Error::Infeasible(format!(
                "tile {i} too sparse: |A∩T| = {a_count}, |B∩T| = {b_count}, \
                 aggregate boundary flow = {}",
                out_mass[i]
            )));
        }
    }

    // transfer phase: for each positive aggregate ψ(T,S), earmark that many
    // lexicographically-least still-unmoved A-points of T for tile S
    let pool: Vec<Vec<Vertex>> = tiling
        .tiles
        .iter()
        .map(|t| t.intersection(a).copied().collect())
        .collect();
    let mut moved: Vec<Vec<Vertex>> = vec![Vec::new(); tiling.tiles.len()];
    let mut earmarked: Vec<VertexSet> = vec![VertexSet::new(); tiling.tiles.len()];
    for (&(t, s), &x) in &aggregate {
        if x <= 0 {
            continue;
        }
        let mut taken = 0;
        for &v in &pool[t] {
            if taken == x {
                break;
            }
            if earmarked[t].insert(v) {
                moved[s].push(v);
                taken += 1;
            }
        }
        // guaranteed by the precondition: |A∩T| > total outgoing mass
        debug_assert_eq!(taken, x);
    }

    // within-tile matching: remaining A-points of T plus arrivals, paired
    // with B∩T in ascending order
    let mut by_gamma: BTreeMap<Translation, VertexSet> = BTreeMap::new();
    for (i, tile) in tiling.tiles.iter().enumerate() {
        let mut holders: Vec<Vertex> = pool[i]
            .iter()
            .copied()
            .filter(|v| !earmarked[i].contains(v))
            .collect();
        holders.extend(moved[i].iter().copied());
        holders.sort_unstable();
        let targets: Vec<Vertex> = tile.intersection(b).copied().collect();
        if holders.len() != targets.len() {
            return Err(Error::Infeasible(format!(
                "tile {i}: {} points to place but {} B-slots (aggregate flow inconsistent)",
                holders.len(),
                targets.len()
            )));
        }
        for (x, t) in holders.into_iter().zip(targets) {
            by_gamma
                .entry(action.translation_between(x, t))
                .or_default()
                .insert(x);
        }
    }

    Ok(Equidecomposition {
        pieces: by_gamma
            .into_iter()
            .map(|(gamma, vertices)| Piece { gamma, vertices })
            .collect(),
    })
}
