use thiserror::Error;

use crate::graph::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("graph has no edges")]
    NoEdges,

    #[error("edge {edge}: length must be positive and finite, got {length}")]
    InvalidLength { edge: usize, length: f64 },

    #[error("edge {edge}: endpoint {vertex} is not a vertex of the graph")]
    UnknownVertex { edge: usize, vertex: usize },

    #[error("vertex {vertex}: expected {expected}x{expected} blocks, found {found}")]
    DimensionMismatch {
        vertex: usize,
        expected: usize,
        found: String,
    },

    #[error("boundary conditions need {expected} vertex blocks, found {found}")]
    BlockCountMismatch { expected: usize, found: usize },

    #[error("vertex block degree must be at least 1")]
    ZeroDegree,

    #[error("boundary conditions are not of non-Robin type: {0}")]
    InvalidBoundaryConditions(ValidationReport),

    #[error("vertex {vertex}: A + iB is numerically singular")]
    SingularVertexBlock { vertex: usize },

    #[error("zeta branch tracking failed near k = {k}: phase jump {jump} at minimal step")]
    BranchTracking { k: f64, jump: f64 },

    #[error(
        "spectrum on ({k0}, {k1}] not certified: reported {reported} eigenvalues, \
         argument count gives {counted}; retry with a finer grid"
    )]
    CertificationMismatch {
        k0: f64,
        k1: f64,
        reported: usize,
        counted: i64,
    },

    #[error("argument count on ({k0}, {k1}] did not settle to an integer (winding {winding})")]
    WindingNotInteger { k0: f64, k1: f64, winding: f64 },

    #[error("order of the secular determinant at k = 0 is inconsistent across refinements: {estimates:?}")]
    ZeroOrderFit { estimates: Vec<f64> },

    #[error("orbit enumeration would produce about {estimate:.3e} classes, budget is {budget:.3e}")]
    OrbitBudgetExceeded { estimate: f64, budget: f64 },

    #[error("quadrature did not converge: error estimate {estimate:.3e} exceeds {target:.3e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error("tail bound not certifiable: {0}")]
    TailsNotCertifiable(String),

    #[error("ambiguous pairing at {location}: {candidates} candidates within {eps:.3e}")]
    AmbiguousPairing {
        location: f64,
        candidates: usize,
        eps: f64,
    },

    #[error("unknown demo graph `{0}`")]
    UnknownDemo(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph file: {0}")]
    Parse(String),
}
