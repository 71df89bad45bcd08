//! Shared inputs for the benchmarks.

use qgraph::demo::{self, FIG1_DEFAULT};
use qgraph::QuantumGraph;

pub fn fig1_pair() -> (QuantumGraph, QuantumGraph) {
    let (a, b, c) = FIG1_DEFAULT;
    (demo::fig1_left(a, b, c).unwrap(), demo::fig1_right(a, b, c).unwrap())
}

pub fn pumpkins(n: usize) -> (QuantumGraph, QuantumGraph) {
    (demo::pumpkin_left(n).unwrap(), demo::pumpkin_right(n).unwrap())
}
