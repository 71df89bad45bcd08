use std::path::PathBuf;

use qgraph::demo;
use qgraph::eigensolver;
use qgraph::graph::{MetricGraph, VertexKind};
use qgraph::io;
use qgraph::QuantumGraph;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn shipped_files_match_generators() {
    for (name, qg) in demo::corpus().unwrap() {
        let file = io::read_graph(&corpus_dir().join(format!("{name}.json"))).unwrap();
        assert_eq!(file.graph.graph(), qg.graph(), "{name}");
        assert_eq!(file.graph.bc(), qg.bc(), "{name}");
        assert!(file.note.is_some(), "{name} carries a note");
    }
}

#[test]
fn fig1_files_record_their_construction() {
    for side in ["left", "right"] {
        let file = io::read_graph(&corpus_dir().join(format!("fig1_{side}.json"))).unwrap();
        let note = file.note.unwrap();
        assert!(note.contains("octagon") && note.contains("Klein"), "{note}");
    }
}

#[test]
fn kirchhoff_zero_multiplicity_counts_components() {
    let two = MetricGraph::from_edges(4, &[(0, 1, 1.0), (1, 0, 0.5), (2, 3, 2.0)]).unwrap();
    let qg = QuantumGraph::kirchhoff(two).unwrap();
    assert_eq!(eigensolver::zero_modes(&qg).unwrap().m0, 2);
    for (name, qg) in demo::corpus().unwrap() {
        let all_kirchhoff = qg.bc().blocks().iter().all(|b| b.kind == VertexKind::Kirchhoff);
        if all_kirchhoff {
            let m0 = eigensolver::zero_modes(&qg).unwrap().m0;
            assert_eq!(m0, qg.graph().connected_components(), "{name}");
        }
    }
}
