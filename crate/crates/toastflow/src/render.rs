//! Static one-shot rendering: pieces of an equidecomposition as a colored
//! SVG grid, graphs as DOT, toasts as nested SVG outlines.

use std::fmt::Write;

use toastflow_core::equidecomp::{Equidecomposition, TorusAction};
use toastflow_core::{Graph, Toast};

const CELL: u32 = 16;

/// Distinct fill colors, recycled when there are more pieces than hues.
const PALETTE: &[&str] = &[
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1f77b4", "#aec7e8",
];

fn svg_header(out: &mut String, w: u32, h: u32) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {0} {1}\">",
        w * CELL,
        h * CELL
    );
}

/// Every piece gets one color; each source vertex is a filled cell with an
/// arrow-free label of its translation written once in a legend row.
pub fn pieces_svg(action: &TorusAction, pieces: &Equidecomposition) -> String {
    let (w, h) = (action.width, action.height);
    let mut out = String::new();
    svg_header(&mut out, w, h + 2);
    let _ = writeln!(
        out,
        "  <rect width=\"{}\" height=\"{}\" fill=\"white\"/>",
        w * CELL,
        (h + 2) * CELL
    );
    for (i, piece) in pieces.pieces.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for &v in &piece.vertices {
            let (x, y) = action.coords(v);
            let _ = writeln!(
                out,
                "  <rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" \
                 fill=\"{color}\" stroke=\"#333\" stroke-width=\"0.5\"/>",
                x * CELL,
                y * CELL
            );
        }
        // legend swatch with the translation vector
        let lx = (i as u32 % w) * CELL;
        let ly = (h + 1 + i as u32 / w) * CELL;
        let _ = writeln!(
            out,
            "  <rect x=\"{lx}\" y=\"{ly}\" width=\"{CELL}\" height=\"{CELL}\" \
             fill=\"{color}\"/><text x=\"{}\" y=\"{}\" font-size=\"6\" \
             fill=\"#000\">({},{})</text>",
            lx + 1,
            ly + CELL - 4,
            piece.gamma.0,
            piece.gamma.1
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Nested tile outlines over the torus grid; deeper tiles draw on top with
/// darker strokes.
pub fn toast_svg(graph: &Graph, toast: &Toast) -> String {
    let (w, h) = graph.torus_dims().unwrap_or((0, 0));
    let mut out = String::new();
    svg_header(&mut out, w, h);
    let _ = writeln!(
        out,
        "  <rect width=\"{}\" height=\"{}\" fill=\"white\"/>",
        w * CELL,
        h * CELL
    );
    let levels = toastflow_core::toast::stratify(toast).ok();
    let depth = levels.as_ref().map_or(1, |l| l.levels.len());
    for tile in toast.tiles() {
        // higher (outer) tiles are lighter; leaves darkest
        let level = levels
            .as_ref()
            .and_then(|l| l.level_of(tile.id))
            .unwrap_or(0);
        let shade = 120 + (level * 100) / depth.max(1);
        for &v in &tile.vertices {
            let (x, y) = (v % w, v / w);
            let _ = writeln!(
                out,
                "  <rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" \
                 fill=\"rgb({shade},{shade},{shade})\" fill-opacity=\"0.5\"/>",
                x * CELL,
                y * CELL
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Plain undirected DOT.
pub fn graph_dot(graph: &Graph) -> String {
    let mut out = String::from("graph g {\n");
    for &v in graph.vertices() {
        let _ = writeln!(out, "  {v};");
    }
    for &(u, v) in graph.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}
