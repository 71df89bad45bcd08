//! Example graphs: intervals, the circle, the pumpkin pair and the
//! isospectral pair with cancelling orbits.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::graph::{BoundaryConditions, MetricGraph, VertexKind};
use crate::scattering::QuantumGraph;

fn with_kinds(graph: MetricGraph, kinds: &[VertexKind]) -> Result<QuantumGraph> {
    let bc = BoundaryConditions::from_kinds(&graph, kinds)?;
    QuantumGraph::new(graph, bc)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
    }
}

/// Unit interval with the given end conditions.
pub fn interval(start: VertexKind, end: VertexKind) -> Result<QuantumGraph> {
    with_kinds(MetricGraph::from_edges(2, &[(0, 1, 1.0)])?, &[start, end])
}

/// One loop of the given length at a degree-2 Kirchhoff vertex.
pub fn circle(length: f64) -> Result<QuantumGraph> {
    positive("circle length", length)?;
    QuantumGraph::kirchhoff(MetricGraph::from_edges(1, &[(0, 0, length)])?)
}

/// Two vertices joined by `2n` unit edges.
pub fn pumpkin_left(n: usize) -> Result<QuantumGraph> {
    if n < 1 {
        return Err(Error::InvalidParameter("pumpkin needs n >= 1".into()));
    }
    let edges: Vec<_> = (0..2 * n).map(|_| (0, 1, 1.0)).collect();
    QuantumGraph::kirchhoff(MetricGraph::from_edges(2, &edges)?)
}

/// Three vertices in a chain with `n` unit edges between neighbours.
pub fn pumpkin_right(n: usize) -> Result<QuantumGraph> {
    if n < 1 {
        return Err(Error::InvalidParameter("pumpkin needs n >= 1".into()));
    }
    let mut edges: Vec<_> = (0..n).map(|_| (0, 1, 1.0)).collect();
    edges.extend((0..n).map(|_| (1, 2, 1.0)));
    QuantumGraph::kirchhoff(MetricGraph::from_edges(3, &edges)?)
}

/// Shared shape of the isospectral pair: a path
/// `N -x- v -2y- v' -x- D` with a pendant edge of length `c` (Neumann leaf)
/// at each of `v`, `v'`.
fn h_tree(x: f64, y: f64, c: f64) -> Result<QuantumGraph> {
    let graph = MetricGraph::new(
        ["n_end", "v", "w", "d_end", "v_leaf", "w_leaf"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        [(0, 1, x), (1, 2, 2.0 * y), (2, 3, x), (1, 4, c), (2, 5, c)]
            .iter()
            .map(|&(tail, head, length)| crate::graph::Edge { tail, head, length })
            .collect(),
    )?;
    use VertexKind::*;
    with_kinds(graph, &[Neumann, Kirchhoff, Kirchhoff, Dirichlet, Neumann, Neumann])
}

fn check_abc(a: f64, b: f64, c: f64) -> Result<()> {
    positive("a", a)?;
    positive("b", b)?;
    positive("c", c)
}

/// Member of the isospectral pair without orbits of length `2a`:
/// outer edges of length `b`, middle edge `2a`.
///
/// Both graphs are quotients of an octagon with alternating sides `2a`,
/// `2b` and a pendant edge `c` at every corner, by the two Klein subgroups
/// of its dihedral symmetry (reflections in the axes, reflections in the
/// diagonals) with a sign character; the mirror points become the
/// Neumann and Dirichlet ends.
pub fn fig1_left(a: f64, b: f64, c: f64) -> Result<QuantumGraph> {
    check_abc(a, b, c)?;
    h_tree(b, a, c)
}

/// Member with outer edges of length `a`: the bounces on them have
/// opposite weights.
pub fn fig1_right(a: f64, b: f64, c: f64) -> Result<QuantumGraph> {
    check_abc(a, b, c)?;
    h_tree(a, b, c)
}

/// Three-vertex Kirchhoff graph with a double edge, fixed lengths.
pub fn three_vertex() -> Result<QuantumGraph> {
    QuantumGraph::kirchhoff(MetricGraph::from_edges(
        3,
        &[(0, 1, 0.83), (1, 2, 1.07), (2, 0, 1.21), (0, 1, 0.94)],
    )?)
}

pub const FIG1_DEFAULT: (f64, f64, f64) = (1.0, SQRT_2, 1.732_050_807_568_877_2);

fn parse_kind(s: &str) -> Result<VertexKind> {
    match s.to_ascii_lowercase().as_str() {
        "d" | "dirichlet" => Ok(VertexKind::Dirichlet),
        "n" | "neumann" => Ok(VertexKind::Neumann),
        "k" | "kirchhoff" => Ok(VertexKind::Kirchhoff),
        other => Err(Error::InvalidParameter(format!("unknown end condition `{other}`"))),
    }
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::InvalidParameter(format!("expected a number, got `{s}`")))
}

fn parse_count(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::InvalidParameter(format!("expected a positive integer, got `{s}`")))
}

/// Build a demo graph from a name and textual parameters.
///
/// `interval [start [end]]` (dirichlet/neumann, default dirichlet both),
/// `interval_dirichlet`, `interval_neumann`, `circle [length]` (default 2π),
/// `pumpkin_left n`, `pumpkin_right n`, `fig1_left [a b c]`,
/// `fig1_right [a b c]` (default 1, √2, √3), `three_vertex`.
pub fn demo_graph(name: &str, params: &[&str]) -> Result<QuantumGraph> {
    let arity = |allowed: &[usize]| -> Result<()> {
        if allowed.contains(&params.len()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "`{name}` takes {allowed:?} parameters, got {}",
                params.len()
            )))
        }
    };
    match name {
        "interval" => {
            arity(&[0, 1, 2])?;
            let start = params.first().map_or(Ok(VertexKind::Dirichlet), |s| parse_kind(s))?;
            let end = params.get(1).map_or(Ok(start), |s| parse_kind(s))?;
            interval(start, end)
        }
        "interval_dirichlet" => {
            arity(&[0])?;
            interval(VertexKind::Dirichlet, VertexKind::Dirichlet)
        }
        "interval_neumann" => {
            arity(&[0])?;
            interval(VertexKind::Neumann, VertexKind::Neumann)
        }
        "circle" => {
            arity(&[0, 1])?;
            circle(params.first().map_or(Ok(2.0 * PI), |s| parse_float(s))?)
        }
        "pumpkin_left" | "pumpkin_right" => {
            arity(&[1])?;
            let n = parse_count(params[0])?;
            if name == "pumpkin_left" {
                pumpkin_left(n)
            } else {
                pumpkin_right(n)
            }
        }
        "fig1_left" | "fig1_right" => {
            arity(&[0, 3])?;
            let (a, b, c) = if params.is_empty() {
                FIG1_DEFAULT
            } else {
                (parse_float(params[0])?, parse_float(params[1])?, parse_float(params[2])?)
            };
            if name == "fig1_left" {
                fig1_left(a, b, c)
            } else {
                fig1_right(a, b, c)
            }
        }
        "three_vertex" => {
            arity(&[0])?;
            three_vertex()
        }
        other => Err(Error::UnknownDemo(other.to_string())),
    }
}

/// The standard corpus: every example family at its default parameters.
pub fn corpus() -> Result<Vec<(&'static str, QuantumGraph)>> {
    let (a, b, c) = FIG1_DEFAULT;
    Ok(vec![
        ("interval_dirichlet", interval(VertexKind::Dirichlet, VertexKind::Dirichlet)?),
        ("interval_neumann", interval(VertexKind::Neumann, VertexKind::Neumann)?),
        ("circle", circle(2.0 * PI)?),
        ("pumpkin_left_2", pumpkin_left(2)?),
        ("pumpkin_right_2", pumpkin_right(2)?),
        ("fig1_left", fig1_left(a, b, c)?),
        ("fig1_right", fig1_right(a, b, c)?),
        ("three_vertex", three_vertex()?),
    ])
}
