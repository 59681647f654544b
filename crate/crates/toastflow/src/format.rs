//! File formats: JSON schemas for graphs, flows, demands, capacities,
//! toasts, vertex sets, pieces, and rounding traces, plus atomic writes.
//!
//! Rationals cross the file boundary as reduced fraction strings "p/q"
//! (integers without the "/q"); flow keys are "u-v" with u < v. All maps
//! serialize in ascending key order, so identical in-memory values always
//! produce identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use toastflow_core::equidecomp::{Equidecomposition, Piece};
use toastflow_core::graph::{Edge, Vertex, VertexSet};
use toastflow_core::rounding::{RoundingTrace, TraceStep};
use toastflow_core::toast::Tile;
use toastflow_core::{ExactRational, Flow, Graph, Toast};

/// Errors carry the exit-code split: `Format` problems exit 2, failed
/// validations exit 1.
#[derive(Debug)]
pub enum FileError {
    Io(String),
    Format(String),
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Io(m) | FileError::Format(m) => write!(f, "{m}"),
        }
    }
}

pub type FileResult<T> = Result<T, FileError>;

fn read_file(path: &Path) -> FileResult<String> {
    fs::read_to_string(path).map_err(|e| FileError::Io(format!("{}: {e}", path.display())))
}

fn parse<T: for<'a> Deserialize<'a>>(path: &Path, text: &str) -> FileResult<T> {
    serde_json::from_str(text).map_err(|e| {
        FileError::Format(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Writes atomically: serialize to a temp file in the target directory,
/// then rename over the destination.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> FileResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| FileError::Format(format!("serializing {}: {e}", path.display())))?;
    bytes.push(b'\n');
    write_bytes_atomic(path, &bytes)
}

pub fn write_bytes_atomic(path: &Path, bytes: &[u8]) -> FileResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| FileError::Io(format!("creating temp file for {}: {e}", path.display())))?;
    std::io::Write::write_all(&mut tmp.as_file(), bytes)
        .map_err(|e| FileError::Io(format!("writing {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| FileError::Io(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

fn edge_key(e: Edge) -> String {
    format!("{}-{}", e.0, e.1)
}

fn parse_edge_key(key: &str) -> FileResult<Edge> {
    let err = || FileError::Format(format!("edge key {key:?} is not \"u-v\" with u < v"));
    let (u, v) = key.split_once('-').ok_or_else(err)?;
    let u: Vertex = u.parse().map_err(|_| err())?;
    let v: Vertex = v.parse().map_err(|_| err())?;
    if u >= v {
        return Err(err());
    }
    Ok((u, v))
}

fn parse_rational(s: &str) -> FileResult<ExactRational> {
    ExactRational::parse(s)
        .ok_or_else(|| FileError::Format(format!("{s:?} is not a fraction \"p/q\"")))
}

// ---- graph ----

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum GraphFile {
    Torus { torus: [u32; 2] },
    Explicit { vertices: Vec<Vertex>, edges: Vec<(Vertex, Vertex)> },
}

pub fn read_graph(path: &Path) -> FileResult<Graph> {
    let file: GraphFile = parse(path, &read_file(path)?)?;
    let graph = match file {
        GraphFile::Torus { torus: [w, h] } => Graph::torus(w, h),
        GraphFile::Explicit { vertices, edges } => Graph::new(vertices, edges),
    };
    graph.map_err(|e| FileError::Format(format!("{}: {e}", path.display())))
}

pub fn write_graph(path: &Path, graph: &Graph) -> FileResult<()> {
    let file = match graph.torus_dims() {
        Some((w, h)) => GraphFile::Torus { torus: [w, h] },
        None => GraphFile::Explicit {
            vertices: graph.vertices().to_vec(),
            edges: graph.edges().to_vec(),
        },
    };
    write_json_atomic(path, &file)
}

// ---- flow ----

#[derive(Serialize, Deserialize)]
struct FlowFile {
    flow: BTreeMap<String, String>,
}

pub fn read_flow(path: &Path, graph: &Graph) -> FileResult<Flow> {
    let file: FlowFile = parse(path, &read_file(path)?)?;
    let mut values = Vec::new();
    for (key, value) in &file.flow {
        values.push((parse_edge_key(key)?, parse_rational(value)?));
    }
    Flow::from_values(graph, values)
        .map_err(|e| FileError::Format(format!("{}: {e}", path.display())))
}

pub fn write_flow(path: &Path, flow: &Flow) -> FileResult<()> {
    write_json_atomic(path, &flow_to_file(flow))
}

fn flow_to_file(flow: &Flow) -> FlowFile {
    FlowFile {
        flow: flow
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(&e, v)| (edge_key(e), v.to_fraction_string()))
            .collect(),
    }
}

pub fn flow_bytes(flow: &Flow) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(&flow_to_file(flow)).expect("string map");
    bytes.push(b'\n');
    bytes
}

// ---- demand / capacity ----

#[derive(Serialize, Deserialize)]
struct DemandFile {
    demand: BTreeMap<String, i64>,
}

pub fn read_demand(path: &Path) -> FileResult<BTreeMap<Vertex, i64>> {
    let file: DemandFile = parse(path, &read_file(path)?)?;
    file.demand
        .into_iter()
        .map(|(k, f)| {
            let v: Vertex = k
                .parse()
                .map_err(|_| FileError::Format(format!("demand key {k:?} is not a vertex")))?;
            Ok((v, f))
        })
        .collect()
}

pub fn write_demand(path: &Path, demand: &BTreeMap<Vertex, i64>) -> FileResult<()> {
    let file = DemandFile {
        demand: demand
            .iter()
            .filter(|(_, &f)| f != 0)
            .map(|(v, &f)| (v.to_string(), f))
            .collect(),
    };
    write_json_atomic(path, &file)
}

#[derive(Serialize, Deserialize)]
struct CapacityFile {
    capacity: BTreeMap<String, u64>,
}

pub fn read_capacity(path: &Path) -> FileResult<BTreeMap<Edge, u64>> {
    let file: CapacityFile = parse(path, &read_file(path)?)?;
    file.capacity
        .into_iter()
        .map(|(k, c)| Ok((parse_edge_key(&k)?, c)))
        .collect()
}

// ---- toast ----

#[derive(Serialize, Deserialize)]
struct TileDto {
    id: u32,
    parent: Option<u32>,
    vertices: Vec<Vertex>,
}

#[derive(Serialize, Deserialize)]
struct ToastFile {
    tiles: Vec<TileDto>,
}

pub fn read_toast(path: &Path) -> FileResult<Toast> {
    let file: ToastFile = parse(path, &read_file(path)?)?;
    let tiles = file
        .tiles
        .into_iter()
        .map(|t| Tile {
            id: t.id,
            parent: t.parent,
            vertices: t.vertices.into_iter().collect(),
        })
        .collect();
    Toast::new(tiles).map_err(|e| FileError::Format(format!("{}: {e}", path.display())))
}

pub fn write_toast(path: &Path, toast: &Toast) -> FileResult<()> {
    let file = ToastFile {
        tiles: toast
            .tiles()
            .iter()
            .map(|t| TileDto {
                id: t.id,
                parent: t.parent,
                vertices: t.vertices.iter().copied().collect(),
            })
            .collect(),
    };
    write_json_atomic(path, &file)
}

// ---- vertex sets ----

#[derive(Serialize, Deserialize)]
struct VertexSetFile {
    vertices: Vec<Vertex>,
}

pub fn read_vertex_set(path: &Path) -> FileResult<VertexSet> {
    let file: VertexSetFile = parse(path, &read_file(path)?)?;
    Ok(file.vertices.into_iter().collect())
}

pub fn write_vertex_set(path: &Path, set: &VertexSet) -> FileResult<()> {
    let file = VertexSetFile {
        vertices: set.iter().copied().collect(),
    };
    write_json_atomic(path, &file)
}

// ---- pieces ----

#[derive(Serialize, Deserialize)]
struct PieceDto {
    gamma: [u32; 2],
    vertices: Vec<Vertex>,
}

#[derive(Serialize, Deserialize)]
struct PiecesFile {
    pieces: Vec<PieceDto>,
}

pub fn read_pieces(path: &Path) -> FileResult<Equidecomposition> {
    let file: PiecesFile = parse(path, &read_file(path)?)?;
    Ok(Equidecomposition {
        pieces: file
            .pieces
            .into_iter()
            .map(|p| Piece {
                gamma: (p.gamma[0], p.gamma[1]),
                vertices: p.vertices.into_iter().collect(),
            })
            .collect(),
    })
}

pub fn pieces_bytes(pieces: &Equidecomposition) -> Vec<u8> {
    let file = PiecesFile {
        pieces: pieces
            .pieces
            .iter()
            .map(|p| PieceDto {
                gamma: [p.gamma.0, p.gamma.1],
                vertices: p.vertices.iter().copied().collect(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&file).expect("plain struct");
    bytes.push(b'\n');
    bytes
}

pub fn write_pieces(path: &Path, pieces: &Equidecomposition) -> FileResult<()> {
    write_bytes_atomic(path, &pieces_bytes(pieces))
}

// ---- trace ----

#[derive(Serialize, Deserialize)]
struct TraceStepDto {
    stage: u8,
    level: u32,
    tile: u32,
    step: u64,
    cycle: Vec<Vertex>,
    constant: String,
}

#[derive(Serialize, Deserialize)]
struct TraceFile {
    steps: Vec<TraceStepDto>,
}

pub fn write_trace(path: &Path, trace: &RoundingTrace) -> FileResult<()> {
    let file = TraceFile {
        steps: trace
            .steps
            .iter()
            .map(|s| TraceStepDto {
                stage: s.stage,
                level: s.level,
                tile: s.tile,
                step: s.step,
                cycle: s.cycle.clone(),
                constant: s.constant.to_fraction_string(),
            })
            .collect(),
    };
    write_json_atomic(path, &file)
}

pub fn read_trace(path: &Path) -> FileResult<RoundingTrace> {
    let file: TraceFile = parse(path, &read_file(path)?)?;
    let mut trace = RoundingTrace::default();
    for s in file.steps {
        trace.steps.push(TraceStep {
            stage: s.stage,
            level: s.level,
            tile: s.tile,
            step: s.step,
            cycle: s.cycle,
            constant: parse_rational(&s.constant)?,
        });
    }
    Ok(trace)
}
