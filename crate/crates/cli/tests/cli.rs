use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qgraph::{demo, io};

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph"))
        .args(args)
        .output()
        .expect("run qgraph")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_demo(dir: &Path, file: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(file);
    let mut full = vec!["demo"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let out = qgraph(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn circle_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_demo(dir.path(), "circle.json", &["circle", "6.283185307179586"]);
    let out = qgraph(&["eigs", g.to_str().unwrap(), "--kmax", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("k,multiplicity\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 10);
    for (j, r) in rows.iter().enumerate() {
        let k: f64 = r[0].parse().unwrap();
        assert!((k - (j + 1) as f64).abs() < 1e-8, "{k}");
        assert_eq!(r[1], "2");
    }
}

#[test]
fn pumpkin_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_demo(dir.path(), "p.json", &["pumpkin_left", "2"]);
    let text = stdout(&qgraph(&["eigs", g.to_str().unwrap(), "--kmax", "10"]));
    let rows = rows(&text);
    assert_eq!(rows.len(), 3);
    for (j, r) in rows.iter().enumerate() {
        let k: f64 = r[0].parse().unwrap();
        assert!((k - (j + 1) as f64 * PI).abs() < 1e-8);
        assert_eq!(r[1], "4");
    }
}

#[test]
fn self_comparison_trace_check() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_demo(dir.path(), "t.json", &["three_vertex"]);
    let p = g.to_str().unwrap();
    let out = qgraph(&["trace-check", p, p, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["difference"]["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["difference"]["pass"], true);
}

#[test]
fn single_trace_check_and_weyl_pass() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_demo(dir.path(), "n.json", &["interval", "neumann"]);
    let p = g.to_str().unwrap();
    let out = qgraph(&["trace-check", p, "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &rows(&stdout(&out))[0];
    assert_eq!(r.last().unwrap(), "true");
    let out = qgraph(&["weyl", p, "--kmax", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains(",true"));
}

#[test]
fn demo_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 5] = [
        ("circle", &["2.5"]),
        ("pumpkin_right", &["3"]),
        ("fig1_left", &[]),
        ("fig1_right", &["1", "2", "3"]),
        ("interval", &["dirichlet", "neumann"]),
    ];
    for (name, params) in cases {
        let mut args = vec![name];
        args.extend_from_slice(params);
        let path = write_demo(dir.path(), &format!("{name}.json"), &args);
        let parsed = io::read_graph(&path).unwrap().graph;
        let direct = demo::demo_graph(name, params).unwrap();
        assert_eq!(parsed.graph(), direct.graph(), "{name}");
        assert_eq!(parsed.bc(), direct.bc(), "{name}");
    }
}

#[test]
fn output_does_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_demo(dir.path(), "f.json", &["fig1_right"]);
    let p = g.to_str().unwrap();
    for args in [
        vec!["eigs", p, "--kmax", "40"],
        vec!["lenspec", p, "--lmax", "9"],
        vec!["lenspec", p, "--lmax", "9", "--grouping", "numeric"],
        vec!["orbits", p, "--lmax", "7"],
    ] {
        let mut one = args.clone();
        one.extend_from_slice(&["--threads", "1"]);
        let mut four = args.clone();
        four.extend_from_slice(&["--threads", "4"]);
        let a = qgraph(&one);
        let b = qgraph(&four);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn lenspec_reports_cancellation() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_demo(dir.path(), "r.json", &["fig1_right"]);
    let text = stdout(&qgraph(&["lenspec", g.to_str().unwrap(), "--lmax", "2.5"]));
    let at_2a = rows(&text).into_iter().find(|r| r[0] == "2").expect("entry at 2a");
    assert!(at_2a[1].parse::<f64>().unwrap().abs() < 1e-9);
    assert_eq!(at_2a[2], "2");
}

#[test]
fn compare_report() {
    let dir = tempfile::tempdir().unwrap();
    let n = write_demo(dir.path(), "n.json", &["interval_neumann"]);
    let d = write_demo(dir.path(), "d.json", &["interval_dirichlet"]);
    let out = qgraph(&["compare", n.to_str().unwrap(), d.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "isospectral_away_from_zero");
    assert_eq!(v["zero_a"]["m0"], 1);
    assert_eq!(v["zero_b"]["m0"], 0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_demo(dir.path(), "c.json", &["circle"]);
    let target = dir.path().join("eigs.csv");
    let out = qgraph(&["eigs", g.to_str().unwrap(), "--kmax", "3", "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(target).unwrap().lines().count(), 4);
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"vertices": [{"id": 0, "bc": "kirchhoff"}], "edges": [{"from": 0, "to": 0}]}"#,
    )
    .unwrap();
    let out = qgraph(&["eigs", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("edges[0].length"));

    assert_eq!(qgraph(&["demo", "drum"]).status.code(), Some(1));
    assert_eq!(qgraph(&["frobnicate"]).status.code(), Some(1));
    let g = write_demo(dir.path(), "c.json", &["circle"]);
    assert_eq!(qgraph(&["eigs", g.to_str().unwrap(), "--tol", "0.5"]).status.code(), Some(1));
}

#[test]
fn orbit_budget_guard_reports_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_demo(dir.path(), "t.json", &["three_vertex"]);
    let out = qgraph(&["orbits", g.to_str().unwrap(), "--lmax", "60"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("classes") && err.contains("budget"), "{err}");
}
