//! Vertex scattering matrix, metric phases and the secular determinant.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{self, Bond, BoundaryConditions, MetricGraph};
use crate::linalg::{self, CMatrix, I};

/// Entries of `S` below this magnitude (per real/imaginary part) are set to zero.
const SNAP: f64 = 1e-15;

/// `S = -(A + iB)^{-1}(A - iB)` in global end-value coordinates.
///
/// Row `i`, column `j` is the amplitude scattered into the bond leaving
/// through end `i` from a wave arriving at end `j`; both ends sit at the
/// same vertex or the entry is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    matrix: CMatrix,
    bonds: Vec<Bond>,
}

impl ScatteringMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖S S* - Id‖`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        linalg::matrix_norm(&(&self.matrix * self.matrix.adjoint() - linalg::identity(n)))
    }

    /// `‖S - S*‖`.
    pub fn hermiticity_defect(&self) -> f64 {
        linalg::matrix_norm(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `‖S² - Id‖`.
    pub fn involution_defect(&self) -> f64 {
        let n = self.dim();
        linalg::matrix_norm(&(&self.matrix * &self.matrix - linalg::identity(n)))
    }

    /// Weight for the transition from bond `from` into bond `to`: the
    /// entry `S[to, reversal(from)]`, zero unless `from` ends where `to`
    /// starts.
    pub fn transition(&self, from: usize, to: usize) -> Complex64 {
        self.matrix[(to, self.bonds[from].reversal)]
    }
}

pub fn vertex_s_matrix(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    let plus = a + b * I;
    let minus = a - b * I;
    let sv = linalg::singular_values(&plus);
    let (top, bottom) = (sv.first().copied()?, sv.last().copied()?);
    if top == 0.0 || bottom < 1e-12 * top {
        return None;
    }
    let solved = plus.lu().solve(&minus)?;
    Some(-solved)
}

fn snap(z: Complex64) -> Complex64 {
    let part = |x: f64| if x.abs() < SNAP { 0.0 } else { x };
    Complex64::new(part(z.re), part(z.im))
}

/// Assemble `S` vertex by vertex.
pub fn s_matrix(graph: &MetricGraph, bc: &BoundaryConditions) -> Result<ScatteringMatrix> {
    // dimension checks live in global_pair
    bc.global_pair(graph)?;
    let n = graph.bond_count();
    let mut matrix = CMatrix::zeros(n, n);
    for v in 0..graph.vertex_count() {
        let block = bc.block(v);
        let sv = vertex_s_matrix(&block.a, &block.b)
            .ok_or(Error::SingularVertexBlock { vertex: v })?;
        let ends = graph.incident_ends(v);
        for (r, &row) in ends.iter().enumerate() {
            for (s, &col) in ends.iter().enumerate() {
                matrix[(row, col)] = snap(sv[(r, s)]);
            }
        }
    }
    Ok(ScatteringMatrix {
        matrix,
        bonds: graph.bonds(),
    })
}

/// `T(k)`: the phase `exp(i k L(e))` linking end `j` with its partner end.
pub fn t_matrix(graph: &MetricGraph, k: f64) -> CMatrix {
    t_matrix_complex(graph, Complex64::new(k, 0.0))
}

pub fn t_matrix_complex(graph: &MetricGraph, k: Complex64) -> CMatrix {
    let n = graph.bond_count();
    let mut t = CMatrix::zeros(n, n);
    for j in 0..n {
        t[(j, graph.partner(j))] = (I * k * graph.bond_length(j)).exp();
    }
    t
}

/// A validated graph together with its scattering matrix.
#[derive(Debug, Clone)]
pub struct QuantumGraph {
    graph: MetricGraph,
    bc: BoundaryConditions,
    smat: ScatteringMatrix,
}

impl QuantumGraph {
    pub fn new(graph: MetricGraph, bc: BoundaryConditions) -> Result<Self> {
        let report = graph::validate(&graph, &bc)?;
        if !report.is_pass() {
            return Err(Error::InvalidBoundaryConditions(report));
        }
        let smat = s_matrix(&graph, &bc)?;
        Ok(Self { graph, bc, smat })
    }

    pub fn kirchhoff(graph: MetricGraph) -> Result<Self> {
        let bc = BoundaryConditions::kirchhoff(&graph)?;
        Self::new(graph, bc)
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn bc(&self) -> &BoundaryConditions {
        &self.bc
    }

    pub fn s(&self) -> &ScatteringMatrix {
        &self.smat
    }

    pub fn bond_count(&self) -> usize {
        self.graph.bond_count()
    }

    pub fn total_length(&self) -> f64 {
        self.graph.total_length()
    }

    /// The same graph with `A` and `B` exchanged at every vertex.
    pub fn swap_ab(&self) -> Result<Self> {
        Self::new(self.graph.clone(), self.bc.swap_ab())
    }

    /// `U(k) = S T(k)`, built column by column: column `m` is column
    /// `reversal(m)` of `S` times the phase of bond `m`.
    pub fn secular_matrix(&self, k: f64) -> CMatrix {
        self.secular_matrix_complex(Complex64::new(k, 0.0))
    }

    pub fn secular_matrix_complex(&self, k: Complex64) -> CMatrix {
        let n = self.bond_count();
        let s = self.smat.matrix();
        let mut u = CMatrix::zeros(n, n);
        for m in 0..n {
            let phase = (I * k * self.graph.bond_length(m)).exp();
            let src = self.graph.partner(m);
            for i in 0..n {
                let z = s[(i, src)];
                if z != Complex64::new(0.0, 0.0) {
                    u[(i, m)] = z * phase;
                }
            }
        }
        u
    }

    /// `det(Id - U(k))`.
    pub fn secular_det(&self, k: f64) -> Complex64 {
        self.secular_det_complex(Complex64::new(k, 0.0))
    }

    pub fn secular_det_complex(&self, k: Complex64) -> Complex64 {
        let n = self.bond_count();
        (linalg::identity(n) - self.secular_matrix_complex(k)).determinant()
    }

    /// `ζ(k) = det(U(k))^{-1/2} det(Id - U(k))` with the square-root branch
    /// continued from a default reference point `π / (4 L_max)`.
    pub fn zeta(&self, k: f64) -> Result<Complex64> {
        let k_ref = PI / (4.0 * self.graph.max_edge_length());
        self.zeta_from(k, k_ref)
    }

    /// `ζ(k)` with the branch of `det(U)^{1/2}` fixed as the principal root
    /// at `k_ref` and continued along the real axis.
    pub fn zeta_from(&self, k: f64, k_ref: f64) -> Result<Complex64> {
        let det_u = |x: f64| self.secular_matrix(x).determinant();
        let mut theta = det_u(k_ref).arg();
        let mut prev = det_u(k_ref);
        let mut at = k_ref;
        let base_step = PI / (8.0 * self.total_length());
        let dir = if k >= k_ref { 1.0 } else { -1.0 };
        while (k - at) * dir > 0.0 {
            let mut step = base_step.min((k - at).abs());
            loop {
                let next = det_u(at + dir * step);
                let jump = (next / prev).arg();
                if jump.abs() <= PI / 2.0 {
                    theta += jump;
                    prev = next;
                    at += dir * step;
                    break;
                }
                step /= 2.0;
                if step < 1e-12 {
                    return Err(Error::BranchTracking { k: at, jump });
                }
            }
            if (k - at).abs() < 1e-15 * k.abs().max(1.0) {
                break;
            }
        }
        let half = Complex64::from_polar(1.0, -theta / 2.0);
        Ok(half * self.secular_det(k))
    }
}
