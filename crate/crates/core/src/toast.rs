//! Connected toasts: nested families of finite connected tiles.
//!
//! A toast is a forest of tiles (vertex sets) such that
//!
//! 1. every edge of the graph is induced in some tile,
//! 2. for every pair of tiles, either they are neighborhood-separated or
//!    one together with its 1-neighborhood is contained in the other,
//! 3. every tile minus its descendants induces a connected subgraph.
//!
//! On a finite graph property 1 forces the maximal tile of each connected
//! component to be the whole component.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::graph::{Graph, VertexSet};
use crate::{Error, Result};

pub type TileId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    pub id: TileId,
    pub parent: Option<TileId>,
    pub vertices: VertexSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Toast {
    tiles: Vec<Tile>,
    by_id: BTreeMap<TileId, usize>,
}

/// One violated toast property, with the offending tile ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A tile that is empty or induces a disconnected subgraph
    /// (definition preamble; reported under property 3).
    TileNotConnected(TileId),
    /// An edge of the graph induced in no tile (property 1).
    UncoveredEdge(u32, u32),
    /// Incomparable tiles that touch, or a contained tile whose
    /// 1-neighborhood leaves the container (property 2).
    BadNesting(TileId, TileId),
    /// Two distinct tiles with identical vertex sets (rejected outright;
    /// the nesting dichotomy is silent about them).
    DuplicateTiles(TileId, TileId),
    /// A tile whose free region is disconnected (property 3).
    FreeRegionDisconnected(TileId),
}

impl Violation {
    /// The property number (1, 2 or 3) of the toast definition.
    pub fn property(&self) -> u8 {
        match self {
            Violation::UncoveredEdge(..) => 1,
            Violation::BadNesting(..) | Violation::DuplicateTiles(..) => 2,
            Violation::TileNotConnected(..) | Violation::FreeRegionDisconnected(..) => 3,
        }
    }
}

/// Level stratification: `levels[0]` is the set of minimal tiles, each
/// further entry the minimal tiles of the remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToastLevels {
    pub levels: Vec<BTreeSet<TileId>>,
}

impl ToastLevels {
    pub fn level_of(&self, id: TileId) -> Option<usize> {
        self.levels.iter().position(|l| l.contains(&id))
    }
}

impl Toast {
    /// Builds a toast from raw tile records, checking only structural
    /// well-formedness (unique ids, parent ids resolve, no empty tiles);
    /// semantic validation is [`validate_toast`].
    pub fn new(tiles: Vec<Tile>) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        for (i, t) in tiles.iter().enumerate() {
            if by_id.insert(t.id, i).is_some() {
                return Err(Error::Format(format!("duplicate tile id {}", t.id)));
            }
        }
        for t in &tiles {
            if t.vertices.is_empty() {
                return Err(Error::Format(format!("tile {} is empty", t.id)));
            }
            if let Some(p) = t.parent {
                if p == t.id {
                    return Err(Error::Format(format!("tile {} is its own parent", t.id)));
                }
                if !by_id.contains_key(&p) {
                    return Err(Error::Format(format!(
                        "tile {} references missing parent {p}",
                        t.id
                    )));
                }
            }
        }
        Ok(Toast { tiles, by_id })
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tile(&self, id: TileId) -> Result<&Tile> {
        self.by_id
            .get(&id)
            .map(|&i| &self.tiles[i])
            .ok_or_else(|| Error::Domain(format!("unknown tile id {id}")))
    }

    /// Ids of tiles whose vertex set is a strict subset of `id`'s.
    pub fn descendants(&self, id: TileId) -> Result<Vec<TileId>> {
        let me = self.tile(id)?;
        Ok(self
            .tiles
            .iter()
            .filter(|t| t.id != id && t.vertices.is_subset(&me.vertices) && t.vertices != me.vertices)
            .map(|t| t.id)
            .collect())
    }

    /// Direct children in the containment order: descendants not contained
    /// in any other descendant.
    pub fn children(&self, id: TileId) -> Result<Vec<TileId>> {
        let desc = self.descendants(id)?;
        let mut out = Vec::new();
        for &d in &desc {
            let dv = &self.tile(d)?.vertices;
            let nested = desc.iter().any(|&o| {
                o != d && dv.is_subset(&self.tile(o).unwrap().vertices)
            });
            if !nested {
                out.push(d);
            }
        }
        Ok(out)
    }

    /// The tile's vertices minus all descendant tiles' vertices.
    pub fn free_region(&self, id: TileId) -> Result<VertexSet> {
        let mut region = self.tile(id)?.vertices.clone();
        for d in self.descendants(id)? {
            for v in &self.tile(d)?.vertices {
                region.remove(v);
            }
        }
        Ok(region)
    }

    /// Tiles not strictly contained in any other tile.
    pub fn roots(&self) -> Vec<TileId> {
        self.tiles
            .iter()
            .filter(|t| {
                !self.tiles.iter().any(|o| {
                    o.id != t.id && t.vertices.is_subset(&o.vertices) && t.vertices != o.vertices
                })
            })
            .map(|t| t.id)
            .collect()
    }
}

/// Checks every toast property, reporting all violations found.
pub fn validate_toast(graph: &Graph, toast: &Toast) -> Result<Vec<Violation>> {
    for t in toast.tiles() {
        graph
            .check_vertices(&t.vertices)
            .map_err(|_| Error::Format(format!("tile {} references unknown vertices", t.id)))?;
    }
    let mut violations = Vec::new();

    // preamble: finite connected tiles
    for t in toast.tiles() {
        if !graph.is_connected_set(&t.vertices) {
            violations.push(Violation::TileNotConnected(t.id));
        }
    }

    // property 2: pairwise nesting/separation dichotomy
    let closures: BTreeMap<TileId, VertexSet> = toast
        .tiles()
        .iter()
        .map(|t| {
            let mut c = t.vertices.clone();
            c.extend(graph.neighborhood(&t.vertices, 1).unwrap_or_default());
            (t.id, c)
        })
        .collect();
    for (i, a) in toast.tiles().iter().enumerate() {
        for b in &toast.tiles()[i + 1..] {
            if a.vertices == b.vertices {
                violations.push(Violation::DuplicateTiles(a.id, b.id));
                continue;
            }
            let ok = if a.vertices.is_subset(&b.vertices) {
                closures[&a.id].is_subset(&b.vertices)
            } else if b.vertices.is_subset(&a.vertices) {
                closures[&b.id].is_subset(&a.vertices)
            } else {
                closures[&a.id].iter().all(|v| !b.vertices.contains(v))
            };
            if !ok {
                violations.push(Violation::BadNesting(a.id, b.id));
            }
        }
    }

    // property 1: every edge induced in some tile
    let mut covered: BTreeSet<(u32, u32)> = BTreeSet::new();
    for t in toast.tiles() {
        covered.extend(graph.induced_edges(&t.vertices));
    }
    for &e in graph.edges() {
        if !covered.contains(&e) {
            violations.push(Violation::UncoveredEdge(e.0, e.1));
        }
    }

    // property 3: free regions connected
    for t in toast.tiles() {
        let region = toast.free_region(t.id)?;
        if region.is_empty() || !graph.is_connected_set(&region) {
            violations.push(Violation::FreeRegionDisconnected(t.id));
        }
    }

    // declared parents must at least be strict supersets
    for t in toast.tiles() {
        if let Some(p) = t.parent {
            let pv = &toast.tile(p)?.vertices;
            if !t.vertices.is_subset(pv) || &t.vertices == pv {
                violations.push(Violation::BadNesting(t.id, p));
            }
        }
    }

    Ok(violations)
}

/// Stratifies a toast into levels of minimal tiles. The level of a tile is
/// its height in the containment forest.
pub fn stratify(toast: &Toast) -> Result<ToastLevels> {
    let n = toast.tiles().len();
    let mut height: BTreeMap<TileId, usize> = BTreeMap::new();
    // iterate to fixpoint; containment is a partial order so n rounds suffice
    for _ in 0..=n {
        let mut changed = false;
        for t in toast.tiles() {
            let h = toast
                .children(t.id)?
                .iter()
                .map(|c| height.get(c).copied().map(|x| x + 1))
                .try_fold(0usize, |acc, x| x.map(|x| acc.max(x)));
            if let Some(h) = h {
                if height.get(&t.id) != Some(&h) {
                    height.insert(t.id, h);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if height.len() != n {
        return Err(Error::Domain("containment order has a cycle".into()));
    }
    let depth = height.values().copied().max().map_or(0, |d| d + 1);
    let mut levels = alloc::vec![BTreeSet::new(); depth];
    for (id, h) in height {
        levels[h].insert(id);
    }
    Ok(ToastLevels { levels })
}

/// The k-separated nesting condition: for every pair of tiles, either the
/// k-neighborhood of one is disjoint from the other, or it is contained in
/// the other. Property 2 is the `k = 1` case.
pub fn is_k_toast(graph: &Graph, toast: &Toast, k: u32) -> Result<bool> {
    assert!(k >= 1);
    let mut covered: BTreeSet<(u32, u32)> = BTreeSet::new();
    for t in toast.tiles() {
        covered.extend(graph.induced_edges(&t.vertices));
    }
    if graph.edges().iter().any(|e| !covered.contains(e)) {
        return Ok(false);
    }
    for (i, a) in toast.tiles().iter().enumerate() {
        let closure_a: VertexSet = {
            let mut c = a.vertices.clone();
            c.extend(graph.neighborhood(&a.vertices, k)?);
            c
        };
        for (j, b) in toast.tiles().iter().enumerate() {
            if i == j {
                continue;
            }
            let disjoint = closure_a.iter().all(|v| !b.vertices.contains(v));
            let nested = closure_a.is_subset(&b.vertices);
            let reverse_nested = b.vertices.is_subset(&a.vertices);
            if !(disjoint || nested || reverse_nested) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks the claim that a k-toast with `k >= 3` and hole-free tiles is a
/// connected toast: returns whether property 3 holds.
pub fn ktoast_implies_connected(graph: &Graph, toast: &Toast) -> Result<bool> {
    if !is_k_toast(graph, toast, 3)? {
        return Err(Error::Domain("not a 3-toast".into()));
    }
    let whole = graph.vertex_count();
    for t in toast.tiles() {
        if t.vertices.len() < whole && !graph.is_hole_free(&t.vertices)? {
            return Err(Error::Domain(format!("tile {} has a hole", t.id)));
        }
    }
    let violations = validate_toast(graph, toast)?;
    Ok(!violations
        .iter()
        .any(|v| matches!(v, Violation::FreeRegionDisconnected(_))))
}

pub(crate) fn rng_below(rng: &mut ChaCha8Rng, bound: u32) -> u32 {
    if bound <= 1 {
        return 0;
    }
    // rejection sampling keeps the draw unbiased
    let zone = u32::MAX - u32::MAX % bound;
    loop {
        let x = rng.next_u32();
        if x < zone {
            return x % bound;
        }
    }
}

/// Generates a connected toast of nested solid squares on `torus(w, h)`.
///
/// Requires `w == h == base * factor^d` for some `d >= 1`. Level-`d` tiles
/// are `(cell - margin)`-sided squares, one per `base * factor^(d-1)` cell,
/// all at a common seeded offset; below the top level, each tile holds a
/// `factor x factor` grid of children inset by `margin` from the tile edge
/// and `margin + 1` from each other, with seeded per-tile jitter in the
/// remaining slack. The root tile is the whole torus. Output satisfies all
/// toast properties and the k-separation condition for `k <= margin`.
pub fn generate_torus_toast(
    w: u32,
    h: u32,
    base: u32,
    factor: u32,
    margin: u32,
    seed: u64,
) -> Result<Toast> {
    if w != h {
        return Err(Error::Parameter(format!("square torus required, got {w}x{h}")));
    }
    if margin < 3 {
        return Err(Error::Parameter("margin must be >= 3".into()));
    }
    if base < margin + 3 {
        return Err(Error::Parameter(format!("base must be >= margin + 3 = {}", margin + 3)));
    }
    if factor == 0 || base == 0 {
        return Err(Error::Parameter("base and factor must be positive".into()));
    }
    // depth: w == base * factor^depth, depth >= 1
    let mut depth = 0u32;
    let mut size = base;
    while size < w {
        if factor == 1 {
            break;
        }
        size = size.checked_mul(factor).ok_or_else(|| Error::Parameter("overflow".into()))?;
        depth += 1;
    }
    if factor == 1 {
        depth = 1;
        size = base;
    }
    if size != w || depth == 0 {
        return Err(Error::Parameter(format!(
            "torus side {w} is not base * factor^d with d >= 1 for base {base}, factor {factor}"
        )));
    }

    // side lengths per level, top (level depth) downwards
    let top_cell = w / if factor == 1 { 1 } else { factor };
    let mut sides = alloc::vec![0u32; depth as usize + 1];
    sides[depth as usize] = top_cell - margin;
    for j in (1..depth).rev() {
        let parent = sides[j as usize + 1];
        let need = 2 * margin + (factor - 1) * (margin + 1);
        if parent <= need {
            return Err(Error::Parameter(format!(
                "margins leave no room for level-{j} tiles; use a larger base or smaller depth"
            )));
        }
        sides[j as usize] = (parent - need) / factor;
        if sides[j as usize] == 0 {
            return Err(Error::Parameter(format!(
                "margins leave no room for level-{j} tiles; use a larger base or smaller depth"
            )));
        }
    }

    let graph = Graph::torus(w, h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tiles = Vec::new();
    let mut next_id: TileId = 0;

    let root_id = next_id;
    next_id += 1;

    // top level: one tile per top_cell x top_cell cell, common offset
    let top_side = sides[depth as usize];
    let off_x = rng_below(&mut rng, margin + 1);
    let off_y = rng_below(&mut rng, margin + 1);
    // stack of (level, x0, y0, side, parent)
    let mut pending: Vec<(u32, u32, u32, u32, TileId)> = Vec::new();
    for cy in 0..(w / top_cell) {
        for cx in 0..(w / top_cell) {
            pending.push((depth, cx * top_cell + off_x, cy * top_cell + off_y, top_side, root_id));
        }
    }

    while let Some((level, x0, y0, side, parent)) = pending.pop() {
        let id = next_id;
        next_id += 1;
        let mut vs = VertexSet::new();
        for dy in 0..side {
            for dx in 0..side {
                vs.insert(graph.torus_vertex(x0 + dx, y0 + dy));
            }
        }
        tiles.push(Tile { id, parent: Some(parent), vertices: vs });

        if level > 1 {
            let child_side = sides[level as usize - 1];
            let pitch = child_side + margin + 1;
            let used = 2 * margin + factor * child_side + (factor - 1) * (margin + 1);
            let slack = side - used;
            let jx = rng_below(&mut rng, slack + 1);
            let jy = rng_below(&mut rng, slack + 1);
            for cy in 0..factor {
                for cx in 0..factor {
                    pending.push((
                        level - 1,
                        x0 + margin + jx + cx * pitch,
                        y0 + margin + jy + cy * pitch,
                        child_side,
                        id,
                    ));
                }
            }
        }
    }

    let root_vertices: VertexSet = graph.vertices().iter().copied().collect();
    tiles.push(Tile { id: root_id, parent: None, vertices: root_vertices });
    tiles.sort_by_key(|t| t.id);
    Toast::new(tiles)
}
