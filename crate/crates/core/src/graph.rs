//! Metric graphs and non-Robin vertex conditions.
//!
//! End values of a function on the graph are indexed globally: coordinate
//! `e` is the start `f_e(0)` of edge `e`, coordinate `E + e` is its end
//! `f_e(L(e))`. Each coordinate also names a directed bond, the one that
//! leaves its vertex through that end, so coordinate `e` runs tail to head
//! along edge `e` and coordinate `E + e` runs head to tail.
//!
//! A vertex block `(A_v, B_v)` acts on the ends incident to `v` in the
//! order given by [`MetricGraph::incident_ends`]: edges in list order, the
//! start end before the end end (a loop contributes both).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Entrywise tolerance for `A B* = 0`.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Relative singular-value threshold for the rank condition.
pub const RANK_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

/// A directed copy of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
    /// Coordinate of the reversed bond.
    pub reversal: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl MetricGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if edges.is_empty() {
            return Err(Error::NoEdges);
        }
        for (i, e) in edges.iter().enumerate() {
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidLength {
                    edge: i,
                    length: e.length,
                });
            }
            for v in [e.tail, e.head] {
                if v >= vertices.len() {
                    return Err(Error::UnknownVertex { edge: i, vertex: v });
                }
            }
        }
        Ok(Self { vertices, edges })
    }

    /// Graph with vertex ids `"0"`, `"1"`, ... and edges given as
    /// `(tail, head, length)`.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let vertices = (0..vertex_count).map(|v| v.to_string()).collect();
        let edges = edges
            .iter()
            .map(|&(tail, head, length)| Edge { tail, head, length })
            .collect();
        Self::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of directed bonds, `2E`.
    pub fn bond_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    pub fn edge_of(&self, coord: usize) -> usize {
        coord % self.edges.len()
    }

    pub fn partner(&self, coord: usize) -> usize {
        let e = self.edges.len();
        if coord < e {
            coord + e
        } else {
            coord - e
        }
    }

    /// Vertex at which end coordinate `coord` sits.
    pub fn end_vertex(&self, coord: usize) -> usize {
        let e = self.edges.len();
        if coord < e {
            self.edges[coord].tail
        } else {
            self.edges[coord - e].head
        }
    }

    pub fn bond_length(&self, coord: usize) -> f64 {
        self.edges[self.edge_of(coord)].length
    }

    pub fn bond(&self, coord: usize) -> Bond {
        Bond {
            edge: self.edge_of(coord),
            from: self.end_vertex(coord),
            to: self.end_vertex(self.partner(coord)),
            reversal: self.partner(coord),
        }
    }

    pub fn bonds(&self) -> Vec<Bond> {
        (0..self.bond_count()).map(|c| self.bond(c)).collect()
    }

    /// End coordinates at vertex `v` in local block order.
    pub fn incident_ends(&self, v: usize) -> Vec<usize> {
        let e = self.edges.len();
        let mut ends = Vec::new();
        for (i, edge) in self.edges.iter().enumerate() {
            if edge.tail == v {
                ends.push(i);
            }
            if edge.head == v {
                ends.push(e + i);
            }
        }
        ends
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.tail == v) + usize::from(e.head == v))
            .sum()
    }

    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertex_count()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.vertex_count())
            .filter(|&v| find(&mut parent, v) == v)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Kirchhoff,
    Dirichlet,
    Neumann,
    Custom,
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VertexKind::Kirchhoff => "kirchhoff",
            VertexKind::Dirichlet => "dirichlet",
            VertexKind::Neumann => "neumann",
            VertexKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Condition `A_v F_v + B_v F'_v = 0` at one vertex.
///
/// `kind` is a label for file output only; equality compares the matrices.
#[derive(Debug, Clone)]
pub struct VertexBlock {
    pub a: CMatrix,
    pub b: CMatrix,
    pub kind: VertexKind,
}

impl PartialEq for VertexBlock {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl VertexBlock {
    pub fn custom(a: CMatrix, b: CMatrix) -> Self {
        Self {
            a,
            b,
            kind: VertexKind::Custom,
        }
    }

    pub fn of_kind(kind: VertexKind, degree: usize) -> Result<Self> {
        match kind {
            VertexKind::Kirchhoff => kirchhoff_block(degree),
            VertexKind::Dirichlet => dirichlet_block(degree),
            VertexKind::Neumann => neumann_block(degree),
            VertexKind::Custom => Err(Error::InvalidParameter(
                "custom blocks need explicit matrices".into(),
            )),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn swapped(&self) -> Self {
        let kind = match self.kind {
            VertexKind::Dirichlet => VertexKind::Neumann,
            VertexKind::Neumann => VertexKind::Dirichlet,
            _ => VertexKind::Custom,
        };
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
            kind,
        }
    }
}

/// Kirchhoff-Neumann block: continuity rows `f_i - f_{i+1} = 0` and the
/// derivative-sum row `Σ f'_i = 0`.
pub fn kirchhoff_block(d: usize) -> Result<VertexBlock> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut a = CMatrix::zeros(d, d);
    let mut b = CMatrix::zeros(d, d);
    for i in 0..d - 1 {
        a[(i, i)] = linalg::c(1.0, 0.0);
        a[(i, i + 1)] = linalg::c(-1.0, 0.0);
    }
    for j in 0..d {
        b[(d - 1, j)] = linalg::c(1.0, 0.0);
    }
    Ok(VertexBlock {
        a,
        b,
        kind: VertexKind::Kirchhoff,
    })
}

pub fn dirichlet_block(d: usize) -> Result<VertexBlock> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    Ok(VertexBlock {
        a: linalg::identity(d),
        b: CMatrix::zeros(d, d),
        kind: VertexKind::Dirichlet,
    })
}

pub fn neumann_block(d: usize) -> Result<VertexBlock> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    Ok(VertexBlock {
        a: CMatrix::zeros(d, d),
        b: linalg::identity(d),
        kind: VertexKind::Neumann,
    })
}

/// Vertex conditions for every vertex of a graph, indexed by vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    blocks: Vec<VertexBlock>,
}

impl BoundaryConditions {
    pub fn from_blocks(blocks: Vec<VertexBlock>) -> Self {
        Self { blocks }
    }

    /// One standard condition per vertex, sized by the vertex degree.
    pub fn from_kinds(graph: &MetricGraph, kinds: &[VertexKind]) -> Result<Self> {
        if kinds.len() != graph.vertex_count() {
            return Err(Error::BlockCountMismatch {
                expected: graph.vertex_count(),
                found: kinds.len(),
            });
        }
        let blocks = kinds
            .iter()
            .enumerate()
            .map(|(v, &kind)| VertexBlock::of_kind(kind, graph.degree(v)))
            .collect::<Result<_>>()?;
        Ok(Self { blocks })
    }

    pub fn uniform(graph: &MetricGraph, kind: VertexKind) -> Result<Self> {
        Self::from_kinds(graph, &vec![kind; graph.vertex_count()])
    }

    pub fn kirchhoff(graph: &MetricGraph) -> Result<Self> {
        Self::uniform(graph, VertexKind::Kirchhoff)
    }

    pub fn blocks(&self) -> &[VertexBlock] {
        &self.blocks
    }

    pub fn block(&self, v: usize) -> &VertexBlock {
        &self.blocks[v]
    }

    /// Exchange the roles of `A` and `B` at every vertex.
    pub fn swap_ab(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(VertexBlock::swapped).collect(),
        }
    }

    /// Global `2E x 2E` pair: rows grouped by vertex, columns in end-value
    /// coordinate order.
    pub fn global_pair(&self, graph: &MetricGraph) -> Result<(CMatrix, CMatrix)> {
        check_dimensions(graph, self)?;
        let n = graph.bond_count();
        let mut a = CMatrix::zeros(n, n);
        let mut b = CMatrix::zeros(n, n);
        let mut row = 0;
        for (v, block) in self.blocks.iter().enumerate() {
            let ends = graph.incident_ends(v);
            for r in 0..block.dim() {
                for (j, &col) in ends.iter().enumerate() {
                    a[(row + r, col)] = block.a[(r, j)];
                    b[(row + r, col)] = block.b[(r, j)];
                }
            }
            row += block.dim();
        }
        Ok((a, b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// `(A_v, B_v)` has rank below the vertex degree (`None` for the global pair).
    RankDeficit {
        vertex: Option<usize>,
        rank: usize,
        expected: usize,
    },
    /// `‖A_v B_v*‖_max` exceeds the tolerance.
    NotOrthogonal { vertex: Option<usize>, norm: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = |v: &Option<usize>| match v {
            Some(v) => format!("vertex {v}"),
            None => "global pair".to_string(),
        };
        match self {
            Violation::RankDeficit {
                vertex,
                rank,
                expected,
            } => write!(f, "{}: rank {rank} < {expected}", at(vertex)),
            Violation::NotOrthogonal { vertex, norm } => {
                write!(f, "{}: |A B*| = {norm:.3e}", at(vertex))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            return f.write_str("pass");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

fn check_dimensions(graph: &MetricGraph, bc: &BoundaryConditions) -> Result<()> {
    if bc.blocks.len() != graph.vertex_count() {
        return Err(Error::BlockCountMismatch {
            expected: graph.vertex_count(),
            found: bc.blocks.len(),
        });
    }
    for (v, block) in bc.blocks.iter().enumerate() {
        let d = graph.degree(v);
        let shapes = [block.a.shape(), block.b.shape()];
        if shapes.iter().any(|&s| s != (d, d)) {
            return Err(Error::DimensionMismatch {
                vertex: v,
                expected: d,
                found: format!("A {:?}, B {:?}", shapes[0], shapes[1]),
            });
        }
    }
    Ok(())
}

fn check_pair(a: &CMatrix, b: &CMatrix, vertex: Option<usize>, out: &mut Vec<Violation>) {
    let d = a.nrows();
    if d == 0 {
        return;
    }
    let joined = CMatrix::from_fn(d, 2 * d, |r, col| {
        if col < d {
            a[(r, col)]
        } else {
            b[(r, col - d)]
        }
    });
    let rank = linalg::rank(&joined, RANK_REL_TOL);
    if rank < d {
        out.push(Violation::RankDeficit {
            vertex,
            rank,
            expected: d,
        });
    }
    let norm = linalg::max_norm(&(a * b.adjoint()));
    if norm > ORTHOGONALITY_TOL {
        out.push(Violation::NotOrthogonal { vertex, norm });
    }
}

/// Check the non-Robin conditions per vertex and for the assembled pair.
pub fn validate(graph: &MetricGraph, bc: &BoundaryConditions) -> Result<ValidationReport> {
    check_dimensions(graph, bc)?;
    let mut violations = Vec::new();
    for (v, block) in bc.blocks.iter().enumerate() {
        check_pair(&block.a, &block.b, Some(v), &mut violations);
    }
    let (a, b) = bc.global_pair(graph)?;
    check_pair(&a, &b, None, &mut violations);
    Ok(ValidationReport { violations })
}
