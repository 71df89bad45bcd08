//! Quantum graphs with non-Robin vertex conditions: scattering matrices,
//! certified eigenvalue spectra, periodic-orbit length spectra and the exact
//! trace formula connecting them.

pub mod analysis;
pub mod demo;
pub mod eigensolver;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod orbits;
pub mod scattering;

pub use eigensolver::{Spectrum, SpectrumEntry, ZeroData};
pub use error::{Error, Result};
pub use orbits::{Grouping, LengthSpectrum, PeriodicOrbit};
pub use graph::{BoundaryConditions, MetricGraph, VertexBlock, VertexKind};
pub use scattering::{QuantumGraph, ScatteringMatrix};
