//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines always reach the
//! test log. Exits nonzero if any criterion fails, except for failures
//! listed in `KNOWN_DEVIATIONS`, whose corrected form must pass instead.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qgraph::analysis::{self, gaussian_test, trace_check, trace_check_auto};
use qgraph::demo::{self, FIG1_DEFAULT};
use qgraph::eigensolver::{self, weyl_check, ZeroData};
use qgraph::graph::MetricGraph;
use qgraph::linalg::max_norm;
use qgraph::orbits::{self, trace_power_from_walks, trace_power_oracle, BondGraph, DEFAULT_EPS};
use qgraph::{Grouping, QuantumGraph, Result, VertexKind};

// Tolerances, as pinned by the criteria.
const C1_REL: f64 = 1e-9;
const C2_RESIDUAL: f64 = 1e-10;
const C2_IDENTITY: f64 = 1e-10;
const C4_SCALE: f64 = 1e-9;
const C5_REL: f64 = 0.02;
const C6_S: f64 = 1e-12;
const C6_K: f64 = 1e-8;
const C6_LEN: f64 = 1e-9;
const C7_WEIGHT: f64 = 1e-9;
const C7_DENSITY: f64 = 1e-9;
const C8_TAIL: f64 = 1e-8;

// Runtime budgets in seconds.
const BUDGETS: [f64; 8] = [1.0, 5.0, 30.0, 30.0, 60.0, 30.0, 60.0, 300.0];

/// Criteria whose stated form is unattainable; the suite checks the
/// corrected form printed on their `corrected` line.
const KNOWN_DEVIATIONS: &[usize] = &[6];

struct Outcome {
    pass: bool,
    detail: String,
    corrected: Option<(bool, String)>,
}

impl Outcome {
    fn plain(pass: bool, detail: String) -> Self {
        Self { pass, detail, corrected: None }
    }
}

fn interval(kind: VertexKind) -> QuantumGraph {
    demo::interval(kind, kind).unwrap()
}

fn c1() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut notes = Vec::new();
    for (kind, expected_zero) in [
        (VertexKind::Dirichlet, ZeroData { m0: 0, n: 1 }),
        (VertexKind::Neumann, ZeroData { m0: 1, n: 1 }),
    ] {
        let qg = interval(kind);
        // the determinant itself against 1 - e^{2ik}
        for &k in &[0.37, 1.9, 2.0 * PI + 0.1, 50.5] {
            let oracle = Complex64::new(1.0, 0.0) - Complex64::new(0.0, 2.0 * k).exp();
            ok &= (qg.secular_det(k) - oracle).norm() < 1e-12;
        }
        let spec = eigensolver::eigenvalues_in(&qg, 0.0, 100.0 * PI + 1.0, 1e-12)?;
        ok &= spec.entries.len() == 100;
        for (n, e) in spec.entries.iter().enumerate() {
            let exact = (n + 1) as f64 * PI;
            let rel = (e.k - exact).abs() / exact;
            worst = worst.max(rel);
            ok &= rel <= C1_REL && e.multiplicity == 1;
        }
        let zero = eigensolver::zero_modes(&qg)?;
        ok &= zero == expected_zero;
        notes.push(format!("{kind}: {} eigenvalues, zero (m0={}, N={})", spec.entries.len(), zero.m0, zero.n));
    }
    Ok(Outcome::plain(ok, format!("{}; max rel err {worst:.2e}", notes.join("; "))))
}

fn c2() -> Result<Outcome> {
    let c0 = analysis::calibrate_volume_coefficient()?;
    let fixed = (c0 - analysis::VOLUME_COEFFICIENT).abs() <= 1e-10;
    let qg = demo::circle(2.0 * PI)?;
    let phi = gaussian_test(1.0)?;
    let (k, l) = analysis::auto_cutoffs(&qg, &phi, 1e-14)?;
    let r = trace_check(&qg, &phi, k, l)?;
    // Σ_{n∈ℤ} e^{-n²} and √π Σ_{m∈ℤ} e^{-π²m²}, summed directly
    let theta: f64 = 1.0 + 2.0 * (1..40).map(|n| (-((n * n) as f64)).exp()).sum::<f64>();
    let dual: f64 =
        PI.sqrt() * (1.0 + 2.0 * (1..10).map(|m| (-(PI * PI) * (m * m) as f64).exp()).sum::<f64>());
    let identity = (theta - dual).abs();
    // spectral side is Σ_{k>0} (mult 2 at each integer), the geometric side
    // adds the volume term √π, the zero term -1 and twice the orbit sum
    let lhs_ok = (r.lhs - (theta - 1.0)).abs() <= C2_IDENTITY;
    let rhs_ok = (r.rhs - (dual - 1.0)).abs() <= C2_IDENTITY;
    let pass = fixed && r.residual <= C2_RESIDUAL && identity <= C2_IDENTITY && lhs_ok && rhs_ok;
    Ok(Outcome::plain(
        pass,
        format!(
            "C0 = {c0:.15}, residual {:.2e}, theta identity defect {identity:.2e}, lhs vs theta-1 {:.2e}, rhs vs dual-1 {:.2e}",
            r.residual,
            (r.lhs - (theta - 1.0)).abs(),
            (r.rhs - (dual - 1.0)).abs()
        ),
    ))
}

fn c3() -> Result<Outcome> {
    let mut ok = true;
    let mut worst = (String::new(), 0.0, 0usize);
    for (name, qg) in demo::corpus()? {
        let spec = eigensolver::eigenvalues_in(&qg, 0.0, 50.0 * PI, 1e-9)?;
        let bound = qg.bond_count() as f64;
        for j in 1..=50 {
            let k = j as f64 * PI;
            let count = spec.count_up_to(k) as f64;
            let deficit = (count - qg.total_length() * k / PI).abs();
            ok &= deficit < bound;
            if deficit / bound > worst.1 {
                worst = (name.to_string(), deficit / bound, j);
            }
        }
        ok &= weyl_check(&qg, &spec).pass;
    }
    Ok(Outcome::plain(
        ok,
        format!("K = jπ, j ≤ 50, all corpus graphs; worst deficit/2E = {:.3} ({} at {}π)", worst.1, worst.0, worst.2),
    ))
}

fn random_three_vertex(seed: u64) -> Result<QuantumGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut len = || rng.gen_range(0.5..1.5);
    let edges = [(0, 1, len()), (1, 2, len()), (2, 0, len()), (0, 2, len())];
    QuantumGraph::kirchhoff(MetricGraph::from_edges(3, &edges)?)
}

fn c4() -> Result<Outcome> {
    let graphs = vec![
        ("interval_dirichlet", interval(VertexKind::Dirichlet)),
        ("interval_neumann", interval(VertexKind::Neumann)),
        ("circle", demo::circle(2.0 * PI)?),
        ("pumpkin_left_2", demo::pumpkin_left(2)?),
        ("random_three_vertex", random_three_vertex(0x5eed)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let ks: Vec<f64> = (0..5).map(|_| rng.gen_range(0.1..40.0)).collect();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (_, qg) in &graphs {
        let scale = (qg.bond_count() as f64).max(1.0);
        let bg = BondGraph::new(qg);
        for n in 1..=8 {
            for &k in &ks {
                let oracle = trace_power_oracle(qg, n, k)?;
                let walks = trace_power_from_walks(&bg, n, k);
                let tol = C4_SCALE * scale.powi(n as i32);
                let defect = oracle.defect().max((oracle.matrix - walks).norm());
                worst = worst.max(defect / tol);
                ok &= defect <= tol;
            }
        }
    }
    Ok(Outcome::plain(ok, format!("n ≤ 8, k = {ks:.3?}; worst defect / (1e-9 (2E)^n) = {worst:.2e}")))
}

/// `Σ |m_left - m_right|` over the difference locations in `(0, K]`,
/// divided by `K`, from the closed-form multiplicities: left has `2n` at
/// every `jπ`; right has `2n - 1` at `jπ` and `1` at odd multiples of `π/2`.
fn pumpkin_brute_force(n: usize, k: f64) -> f64 {
    let mut total = 0usize;
    let mut half = 1usize;
    while half as f64 * PI / 2.0 <= k * (1.0 + 1e-12) {
        let (left, right) = if half % 2 == 0 { (2 * n, 2 * n - 1) } else { (0, 1) };
        total += left.abs_diff(right);
        half += 1;
    }
    total as f64 / k
}

fn c5() -> Result<Outcome> {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [2usize, 3] {
        let left = demo::pumpkin_left(n)?;
        let right = demo::pumpkin_right(n)?;
        let big_k = 200.0 * PI;
        let sl = eigensolver::eigenvalues_in(&left, 0.0, big_k, 1e-9)?;
        let sr = eigensolver::eigenvalues_in(&right, 0.0, big_k, 1e-9)?;
        let eps = 1e-6;
        for j in 1..=20 {
            let k = j as f64 * PI;
            ok &= sl.multiplicity_near(k, eps) == 2 * n;
            ok &= sr.multiplicity_near(k, eps) == 2 * n - 1;
            ok &= sr.multiplicity_near(k - PI / 2.0, eps) == 1;
            ok &= sl.multiplicity_near(k - PI / 2.0, eps) == 0;
        }
        // nothing else in the window
        ok &= sl.count_up_to(20.0 * PI + 0.1) == 40 * n;
        ok &= sr.count_up_to(20.0 * PI + 0.1) == 20 * (2 * n - 1) + 20;
        let density = analysis::eig_density_diff(&sl, &sr, big_k)?;
        let brute = pumpkin_brute_force(n, big_k);
        ok &= (density - brute).abs() <= C5_REL * brute;
        notes.push(format!(
            "n={n}: density {density:.6}, brute force {brute:.6}, stated limit 2/n = {:.6}",
            2.0 / n as f64
        ));
    }
    Ok(Outcome::plain(ok, notes.join("; ")))
}

fn is_bipartite(g: &MetricGraph) -> bool {
    let n = g.vertex_count();
    let mut colour = vec![None; n];
    for s in 0..n {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(false);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let cv = colour[v].unwrap();
            for e in g.edges() {
                for (a, b) in [(e.tail, e.head), (e.head, e.tail)] {
                    if a != v {
                        continue;
                    }
                    match colour[b] {
                        None => {
                            colour[b] = Some(!cv);
                            stack.push(b);
                        }
                        Some(cb) if cb == cv => return false,
                        _ => {}
                    }
                }
            }
        }
    }
    true
}

fn spectra_agree(a: &qgraph::Spectrum, b: &qgraph::Spectrum) -> bool {
    a.entries.len() == b.entries.len()
        && a
            .entries
            .iter()
            .zip(&b.entries)
            .all(|(x, y)| (x.k - y.k).abs() <= C6_K && x.multiplicity == y.multiplicity)
}

fn c6() -> Result<Outcome> {
    let k = 30.0 * PI;
    let l = 8.0;
    let grouping = Grouping::Numeric { eps: DEFAULT_EPS };
    let mut stated = true;
    let mut corrected = true;
    let mut stated_notes = Vec::new();
    let mut corrected_notes = Vec::new();
    for (name, qg) in demo::corpus()? {
        let sw = qg.swap_ab()?;
        let s = qg.s().matrix();
        let s2 = sw.s().matrix();
        let conj_defect = max_norm(&(s2 - s.map(|z| z.conj())));
        let neg_defect = max_norm(&(s2 + s));
        let sa = eigensolver::eigenvalues_in(&qg, 0.0, k, 1e-9)?;
        let sb = eigensolver::eigenvalues_in(&sw, 0.0, k, 1e-9)?;
        let la = orbits::length_spectrum(&qg, l, grouping)?;
        let lb = orbits::length_spectrum(&sw, l, grouping)?;
        let len_density = analysis::len_density_diff(&la, &lb, l)?;
        let same = spectra_agree(&sa, &sb) && len_density <= C6_LEN;
        let ok_here = conj_defect <= C6_S && same;
        stated &= ok_here;
        if !ok_here {
            stated_notes.push(format!(
                "{name}: |S'-conj S| = {conj_defect:.1e}, spectra {}, len density {len_density:.2e}",
                if spectra_agree(&sa, &sb) { "equal" } else { "differ" }
            ));
        }
        // S' = -S always; invariance holds exactly when every closed orbit
        // has an even number of bonds, i.e. on bipartite graphs
        let bipartite = is_bipartite(qg.graph());
        corrected &= neg_defect <= C6_S && same == bipartite;
        corrected_notes.push(format!("{name}: |S'+S| = {neg_defect:.0e}, bipartite {bipartite}, invariant {same}"));
    }
    let za = eigensolver::zero_modes(&interval(VertexKind::Dirichlet))?;
    let zb = eigensolver::zero_modes(&interval(VertexKind::Dirichlet).swap_ab()?)?;
    let m0_differs = za.m0 == 0 && zb.m0 == 1;
    stated &= m0_differs;
    corrected &= m0_differs;
    Ok(Outcome {
        pass: stated,
        detail: if stated_notes.is_empty() {
            "all corpus graphs invariant".into()
        } else {
            stated_notes.join("; ")
        },
        corrected: Some((
            corrected,
            format!("S' = -S; {}; interval m0 {} -> {}", corrected_notes.join("; "), za.m0, zb.m0),
        )),
    })
}

fn c7() -> Result<Outcome> {
    let (a, b, c) = FIG1_DEFAULT;
    let left = demo::fig1_left(a, b, c)?;
    let right = demo::fig1_right(a, b, c)?;
    let big_k = 30.0 * PI;
    let big_l = 6.0 * a.max(b).max(c);
    let exact = orbits::length_spectrum(&right, 2.0 * a + 0.5, Grouping::Exact)?;
    let entry = exact.entries.iter().find(|e| (e.length - 2.0 * a).abs() <= 1e-12);
    let entry_ok = entry.is_some_and(|e| e.weight.abs() <= C7_WEIGHT && e.orbit_count >= 2);
    let left_none = orbits::length_spectrum(&left, 2.0 * a + 0.5, Grouping::Exact)?
        .entries
        .iter()
        .all(|e| (e.length - 2.0 * a).abs() > 1e-12);
    let sl = eigensolver::eigenvalues_in(&left, 0.0, big_k, 1e-9)?;
    let sr = eigensolver::eigenvalues_in(&right, 0.0, big_k, 1e-9)?;
    let eig_density = analysis::eig_density_diff(&sl, &sr, big_k)?;
    let g = Grouping::Numeric { eps: DEFAULT_EPS };
    let ll = orbits::length_spectrum(&left, big_l, g)?;
    let lr = orbits::length_spectrum(&right, big_l, g)?;
    let len_density = analysis::len_density_diff(&ll, &lr, big_l)?;
    let pass = entry_ok && left_none && eig_density <= C7_DENSITY && len_density <= C7_DENSITY;
    Ok(Outcome::plain(
        pass,
        format!(
            "entry at 2a: {}; left graph has no orbit at 2a: {left_none}; eig density {eig_density:.2e} ({} vs {} eigenvalues), len density {len_density:.2e} at L = {big_l:.4}",
            entry.map_or("missing".to_string(), |e| format!("weight {:.1e} from {} orbits", e.weight, e.orbit_count)),
            sl.count(),
            sr.count()
        ),
    ))
}

fn c8() -> Result<Outcome> {
    let mut ok = true;
    let mut worst = (String::new(), 0.0);
    let mut runs = 0;
    for (name, qg) in demo::corpus()? {
        for t in [0.25, 0.5, 1.0] {
            let phi = gaussian_test(t)?;
            let r = trace_check_auto(&qg, &phi, C8_TAIL)?;
            ok &= r.pass && r.tail_lhs <= C8_TAIL && r.tail_rhs <= C8_TAIL;
            let ratio = r.residual / (r.tail_lhs + r.tail_rhs + analysis::trace::RESIDUAL_SLACK);
            if ratio > worst.1 {
                worst = (format!("{name} t={t} (K={:.1}, L={:.2}, residual {:.1e})", r.k_max, r.l_max, r.residual), ratio);
            }
            runs += 1;
        }
    }
    Ok(Outcome::plain(ok, format!("{runs} runs; worst residual/allowance {:.2e} at {}", worst.1, worst.0)))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("closed-form interval spectra", c1),
        ("circle calibration", c2),
        ("Weyl bound", c3),
        ("orbit exhaustiveness", c4),
        ("pumpkin example", c5),
        ("swap invariance", c6),
        ("cancellation detection", c7),
        ("trace formula at scale", c8),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= BUDGETS[i];
        match outcome {
            Ok(o) => {
                let status = if o.pass && in_time { "PASS" } else { "FAIL" };
                println!(
                    "criterion {id} [{status}] {name}: {} ({secs:.2}s, budget {}s)",
                    o.detail, BUDGETS[i]
                );
                if !(o.pass && in_time) {
                    let documented = KNOWN_DEVIATIONS.contains(&id) && in_time;
                    match o.corrected {
                        Some((cpass, cdetail)) if documented => {
                            println!(
                                "criterion {id} [{}] corrected form: {cdetail}",
                                if cpass { "PASS" } else { "FAIL" }
                            );
                            if !cpass {
                                failed.push(id);
                            }
                        }
                        _ => failed.push(id),
                    }
                }
            }
            Err(e) => {
                println!("criterion {id} [FAIL] {name}: error: {e} ({secs:.2}s)");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass or match their documented deviation");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
