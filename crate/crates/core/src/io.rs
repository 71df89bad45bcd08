//! JSON graph files.
//!
//! ```json
//! {
//!   "note": "optional free text",
//!   "vertices": [{"id": "v", "bc": "kirchhoff"},
//!                {"id": 2, "bc": {"A": [[[1, 0]]], "B": [[[0, 0]]]}}],
//!   "edges": [{"from": "v", "to": 2, "length": 1.5}]
//! }
//! ```
//!
//! `bc` is `kirchhoff`, `dirichlet`, `neumann` or a custom pair whose
//! matrices are lists of rows of complex entries `[re, im]` (a bare number
//! is read as a real entry). Rows and columns of a custom block follow the
//! incident-end order of [`MetricGraph::incident_ends`].

use std::collections::HashMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{BoundaryConditions, Edge, MetricGraph, VertexBlock, VertexKind};
use crate::linalg::{c, CMatrix};
use crate::scattering::QuantumGraph;

fn parse_err(field: impl AsRef<str>, msg: impl AsRef<str>) -> Error {
    Error::Parse(format!("{}: {}", field.as_ref(), msg.as_ref()))
}

fn id_string(v: &Value, field: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(parse_err(field, "expected a string or number id")),
    }
}

fn complex_entry(v: &Value, field: &str) -> Result<num_complex::Complex64> {
    match v {
        Value::Number(n) => Ok(c(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64();
            let im = pair[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(c(re, im)),
                _ => Err(parse_err(field, "entries must be numbers")),
            }
        }
        _ => Err(parse_err(field, "expected [re, im] or a number")),
    }
}

fn matrix(v: Option<&Value>, field: &str) -> Result<CMatrix> {
    let rows = v
        .ok_or_else(|| parse_err(field, "missing"))?
        .as_array()
        .ok_or_else(|| parse_err(field, "expected a list of rows"))?;
    if rows.is_empty() {
        return Err(parse_err(field, "matrix has no rows"));
    }
    let mut data = Vec::new();
    let mut width = None;
    for (i, row) in rows.iter().enumerate() {
        let row_field = format!("{field}[{i}]");
        let row = row
            .as_array()
            .ok_or_else(|| parse_err(&row_field, "expected a list of entries"))?;
        if *width.get_or_insert(row.len()) != row.len() {
            return Err(parse_err(&row_field, "rows have different lengths"));
        }
        for (j, entry) in row.iter().enumerate() {
            data.push(complex_entry(entry, &format!("{row_field}[{j}]"))?);
        }
    }
    Ok(CMatrix::from_row_iterator(rows.len(), width.unwrap_or(0), data))
}

enum BcSpec {
    Kind(VertexKind),
    Pair(CMatrix, CMatrix),
}

fn bc_spec(v: Option<&Value>, field: &str) -> Result<BcSpec> {
    match v {
        None => Err(parse_err(field, "missing")),
        Some(Value::String(s)) => match s.as_str() {
            "kirchhoff" => Ok(BcSpec::Kind(VertexKind::Kirchhoff)),
            "dirichlet" => Ok(BcSpec::Kind(VertexKind::Dirichlet)),
            "neumann" => Ok(BcSpec::Kind(VertexKind::Neumann)),
            other => Err(parse_err(
                field,
                format!("unknown condition `{other}` (kirchhoff, dirichlet, neumann or {{A, B}})"),
            )),
        },
        Some(Value::Object(m)) => Ok(BcSpec::Pair(
            matrix(m.get("A"), &format!("{field}.A"))?,
            matrix(m.get("B"), &format!("{field}.B"))?,
        )),
        Some(_) => Err(parse_err(field, "expected a condition name or {A, B}")),
    }
}

/// A parsed graph file.
#[derive(Debug, Clone)]
pub struct GraphFile {
    pub graph: QuantumGraph,
    pub note: Option<String>,
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let root = root
        .as_object()
        .ok_or_else(|| parse_err("document", "expected an object"))?;
    for key in root.keys() {
        if !matches!(key.as_str(), "vertices" | "edges" | "note") {
            return Err(parse_err(key, "unknown field"));
        }
    }
    let note = match root.get("note") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(parse_err("note", "expected a string")),
    };

    let vertex_list = root
        .get("vertices")
        .ok_or_else(|| parse_err("vertices", "missing"))?
        .as_array()
        .ok_or_else(|| parse_err("vertices", "expected a list"))?;
    let mut ids = Vec::with_capacity(vertex_list.len());
    let mut index = HashMap::new();
    let mut specs = Vec::with_capacity(vertex_list.len());
    for (i, v) in vertex_list.iter().enumerate() {
        let field = format!("vertices[{i}]");
        let obj = v
            .as_object()
            .ok_or_else(|| parse_err(&field, "expected an object"))?;
        let id = id_string(
            obj.get("id").ok_or_else(|| parse_err(format!("{field}.id"), "missing"))?,
            &format!("{field}.id"),
        )?;
        if index.insert(id.clone(), i).is_some() {
            return Err(parse_err(format!("{field}.id"), format!("duplicate id `{id}`")));
        }
        ids.push(id);
        specs.push(bc_spec(obj.get("bc"), &format!("{field}.bc"))?);
    }

    let edge_list = root
        .get("edges")
        .ok_or_else(|| parse_err("edges", "missing"))?
        .as_array()
        .ok_or_else(|| parse_err("edges", "expected a list"))?;
    let mut edges = Vec::with_capacity(edge_list.len());
    for (i, e) in edge_list.iter().enumerate() {
        let field = format!("edges[{i}]");
        let obj = e
            .as_object()
            .ok_or_else(|| parse_err(&field, "expected an object"))?;
        let end = |key: &str| -> Result<usize> {
            let f = format!("{field}.{key}");
            let id = id_string(obj.get(key).ok_or_else(|| parse_err(&f, "missing"))?, &f)?;
            index
                .get(&id)
                .copied()
                .ok_or_else(|| parse_err(&f, format!("no vertex with id `{id}`")))
        };
        let (tail, head) = (end("from")?, end("to")?);
        let f = format!("{field}.length");
        let length = obj
            .get("length")
            .ok_or_else(|| parse_err(&f, "missing"))?
            .as_f64()
            .ok_or_else(|| parse_err(&f, "expected a number"))?;
        if !(length > 0.0 && length.is_finite()) {
            return Err(parse_err(&f, format!("must be positive and finite, got {length}")));
        }
        edges.push(Edge { tail, head, length });
    }
    if ids.is_empty() {
        return Err(parse_err("vertices", "graph has no vertices"));
    }
    if edges.is_empty() {
        return Err(parse_err("edges", "graph has no edges"));
    }

    let graph = MetricGraph::new(ids, edges)?;
    let mut blocks = Vec::with_capacity(specs.len());
    for (v, spec) in specs.into_iter().enumerate() {
        let field = format!("vertices[{v}].bc");
        let d = graph.degree(v);
        if d == 0 {
            return Err(parse_err(format!("vertices[{v}]"), "vertex has no incident edges"));
        }
        let block = match spec {
            BcSpec::Kind(kind) => VertexBlock::of_kind(kind, d)?,
            BcSpec::Pair(a, b) => {
                for (name, m) in [("A", &a), ("B", &b)] {
                    if m.shape() != (d, d) {
                        return Err(parse_err(
                            format!("{field}.{name}"),
                            format!("expected {d}x{d} for degree {d}, found {}x{}", m.nrows(), m.ncols()),
                        ));
                    }
                }
                VertexBlock::custom(a, b)
            }
        };
        blocks.push(block);
    }
    let bc = BoundaryConditions::from_blocks(blocks);
    let graph = QuantumGraph::new(graph, bc).map_err(|e| match e {
        Error::InvalidBoundaryConditions(report) => {
            parse_err("vertices[].bc", format!("conditions are not of non-Robin type: {report}"))
        }
        other => other,
    })?;
    Ok(GraphFile { graph, note })
}

pub fn read_graph(path: &Path) -> Result<GraphFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text)
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

fn block_json(block: &VertexBlock, degree: usize) -> Value {
    for kind in [VertexKind::Kirchhoff, VertexKind::Dirichlet, VertexKind::Neumann] {
        if VertexBlock::of_kind(kind, degree).is_ok_and(|std| std == *block) {
            return Value::String(kind.to_string());
        }
    }
    json!({"A": matrix_json(&block.a), "B": matrix_json(&block.b)})
}

/// Serialize a graph; standard blocks are written by name, anything else
/// as explicit matrices.
pub fn graph_to_json(qg: &QuantumGraph, note: Option<&str>) -> Value {
    let g = qg.graph();
    let mut root = Map::new();
    if let Some(note) = note {
        root.insert("note".into(), Value::String(note.into()));
    }
    let vertices = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, id)| json!({"id": id, "bc": block_json(qg.bc().block(v), g.degree(v))}))
        .collect();
    root.insert("vertices".into(), Value::Array(vertices));
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            json!({
                "from": g.vertices()[e.tail],
                "to": g.vertices()[e.head],
                "length": e.length,
            })
        })
        .collect();
    root.insert("edges".into(), Value::Array(edges));
    Value::Object(root)
}

pub fn write_graph_string(qg: &QuantumGraph, note: Option<&str>) -> String {
    let mut s = serde_json::to_string_pretty(&graph_to_json(qg, note)).expect("graph JSON");
    s.push('\n');
    s
}
