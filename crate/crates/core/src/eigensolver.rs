//! Eigenvalues `k > 0` of a quantum graph from the eigenphases of `U(k)`.
//!
//! `k` is an eigenvalue of multiplicity `m` exactly when `m` eigenphases of
//! the unitary `U(k)` sit at 0 (mod 2π). The solver scans a uniform grid
//! and brackets changes of the crossing count
//!
//! ```text
//! C(k) = (2𝓛(k - a) + Σθ_j(a) - Σθ_j(k)) / 2π,   θ_j ∈ [0, 2π),
//! ```
//!
//! which is an integer at every `k` because `det U(k)` turns at the exact
//! rate `2𝓛`. Brackets are bisected, clustered and assigned the number of
//! phases within the phase threshold of 0. Completeness is certified
//! independently by the argument principle for `det(Id - U(z))` on a
//! rectangle around the scanned segment of the real axis; all zeros of the
//! secular determinant are real, so the winding number counts eigenvalues.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scattering::QuantumGraph;

pub const PHASE_THRESHOLD: f64 = 1e-7;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub k: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub k0: f64,
    pub k1: f64,
    pub entries: Vec<SpectrumEntry>,
    /// Entries closer than this are indistinguishable to the solver.
    pub resolution: f64,
    pub phase_threshold: f64,
    pub tol: f64,
    /// Argument-principle count over the scanned segment `(scan_start, scan_end)`.
    pub certified_count: i64,
    pub scan_start: f64,
    pub scan_end: f64,
}

impl Spectrum {
    /// Eigenvalues counted with multiplicity.
    pub fn count(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn count_up_to(&self, k: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| e.k <= k)
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn multiplicity_near(&self, k: f64, eps: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| (e.k - k).abs() <= eps)
            .map(|e| e.multiplicity)
            .sum()
    }

    /// Restrict to `(k0, k1]` with the same boundary rule as the solver.
    pub fn restricted(&self, k0: f64, k1: f64) -> Spectrum {
        let half = 0.5 * self.resolution;
        let mut out = self.clone();
        out.entries.retain(|e| e.k > k0 + half && e.k <= k1 + half);
        out.k0 = k0;
        out.k1 = k1;
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub phase_threshold: f64,
    /// Divides the default grid spacing `π / (4 L_max 2E)`.
    pub grid_refinement: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            phase_threshold: PHASE_THRESHOLD,
            grid_refinement: 1.0,
        }
    }
}

/// Eigenphases of a unitary matrix via two Hermitian eigenproblems.
///
/// The Hermitian part `(U + U*)/2` has eigenvalues `cos θ_j`, so every phase
/// lies in `{±acos}`. A rotation `e^{iα}` moving `-1` into the widest gap of
/// that set makes `Id + e^{iα}U` well conditioned, and the Cayley transform
/// `H = i(Id - V)(Id + V)^{-1}`, `V = e^{iα}U`, has eigenvalues `tan((θ+α)/2)`.
fn unitary_phases(u: CMatrix) -> Vec<f64> {
    let n = u.nrows();
    let hermitian = |m: CMatrix| (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let cosines = hermitian(u.clone()).symmetric_eigenvalues();
    let mut candidates: Vec<f64> = cosines
        .iter()
        .flat_map(|&c| {
            let t = c.clamp(-1.0, 1.0).acos();
            [t, TAU - t]
        })
        .collect();
    candidates.sort_by(f64::total_cmp);
    let mut gap = (TAU - candidates[candidates.len() - 1] + candidates[0], candidates[candidates.len() - 1]);
    for w in candidates.windows(2) {
        if w[1] - w[0] > gap.0 {
            gap = (w[1] - w[0], w[0]);
        }
    }
    let middle = gap.1 + 0.5 * gap.0;
    let alpha = PI - middle;
    let v = &u * Complex64::from_polar(1.0, alpha);
    let id = linalg::identity(n);
    let plus = &id + &v;
    let minus = &id - &v;
    // the factors commute, so solving from the left gives the same H
    let h = plus
        .lu()
        .solve(&minus)
        .expect("Id + V is invertible after rotation")
        * linalg::I;
    let mut phases: Vec<f64> = hermitian(h)
        .symmetric_eigenvalues()
        .iter()
        .map(|&lambda| (2.0 * lambda.atan() - alpha).rem_euclid(TAU))
        .collect();
    phases.sort_by(f64::total_cmp);
    phases
}

/// Eigenphases of `U(k)` in `[0, 2π)`, sorted.
pub fn eigenphases(qg: &QuantumGraph, k: f64) -> Vec<f64> {
    unitary_phases(qg.secular_matrix(k))
}

fn phases_near_zero(phases: &[f64], threshold: f64) -> usize {
    phases
        .iter()
        .filter(|&&t| linalg::circular_distance_to_zero(t) <= threshold)
        .count()
}

fn min_phase_distance(phases: &[f64]) -> f64 {
    phases
        .iter()
        .map(|&t| linalg::circular_distance_to_zero(t))
        .fold(f64::INFINITY, f64::min)
}

struct Counter<'a> {
    qg: &'a QuantumGraph,
    origin: f64,
    origin_sum: f64,
    total_length: f64,
}

impl<'a> Counter<'a> {
    fn new(qg: &'a QuantumGraph, origin: f64) -> Self {
        let origin_sum = eigenphases(qg, origin).iter().sum();
        Self {
            qg,
            origin,
            origin_sum,
            total_length: qg.total_length(),
        }
    }

    fn raw(&self, k: f64) -> f64 {
        let sum: f64 = eigenphases(self.qg, k).iter().sum();
        (2.0 * self.total_length * (k - self.origin) + self.origin_sum - sum) / TAU
    }

    fn count(&self, k: f64) -> Result<i64> {
        let raw = self.raw(k);
        let n = raw.round();
        if (raw - n).abs() > 1e-6 {
            return Err(Error::WindingNotInteger {
                k0: self.origin,
                k1: k,
                winding: raw,
            });
        }
        Ok(n as i64)
    }

    /// Points in `(lo, hi]` where the count changes, with the change.
    fn bisect(
        &self,
        lo: f64,
        hi: f64,
        c_lo: i64,
        c_hi: i64,
        width: f64,
        out: &mut Vec<(f64, i64)>,
    ) -> Result<()> {
        if c_lo == c_hi {
            // net zero; a hidden pair would show up in certification
            return Ok(());
        }
        if hi - lo <= width {
            out.push((0.5 * (lo + hi), c_hi - c_lo));
            return Ok(());
        }
        let mid = 0.5 * (lo + hi);
        let c_mid = self.count(mid)?;
        self.bisect(lo, mid, c_lo, c_mid, width, out)?;
        self.bisect(mid, hi, c_mid, c_hi, width, out)
    }
}

fn grid_spacing(qg: &QuantumGraph, opts: &SolverOptions) -> f64 {
    let g = qg.graph();
    PI / (4.0 * g.max_edge_length() * g.bond_count() as f64) / opts.grid_refinement.max(1.0)
}

/// Margin (in radians) every phase keeps from 0 at scan endpoints.
fn endpoint_margin(qg: &QuantumGraph, step: f64) -> f64 {
    (0.05 * qg.graph().min_edge_length() * step).min(1e-3)
}

/// Point near `k` (moving in `dir`, within about three grid steps) whose
/// phases stay farthest from 0. Contour sides through such points keep the
/// determinant away from its zeros.
fn safe_point(qg: &QuantumGraph, k: f64, dir: f64, step: f64) -> f64 {
    let margin = endpoint_margin(qg, step);
    let mut best = (k, -1.0);
    for j in 0..24 {
        let x = k + dir * step * (j as f64) * 0.125;
        if x <= 0.0 {
            break;
        }
        let d = min_phase_distance(&eigenphases(qg, x));
        if d > best.1 {
            best = (x, d);
        }
    }
    if best.1 < margin {
        // fall back to the first acceptable point further out
        for j in 24..64 {
            let x = k + dir * step * (j as f64) * 0.125;
            if x <= 0.0 {
                break;
            }
            if min_phase_distance(&eigenphases(qg, x)) >= margin {
                return x;
            }
        }
    }
    best.0
}

/// Small positive start point with no eigenvalue in `(0, start]`.
fn start_near_zero(qg: &QuantumGraph, step: f64) -> f64 {
    let l_max = qg.graph().max_edge_length();
    let at_zero = eigenphases(qg, 0.0);
    let gap = at_zero
        .iter()
        .map(|&t| linalg::circular_distance_to_zero(t))
        .filter(|&d| d > 1e-6)
        .fold(PI, f64::min);
    let candidate = (0.5 * gap / l_max).min(0.5 * step);
    candidate.max(1e-6 / l_max)
}

/// Argument principle for `det(Id - U(z))` on the rectangle
/// `[a, b] × [-η, η]`, `η = 1 / (2 L_max)`.
pub fn argument_count(qg: &QuantumGraph, a: f64, b: f64) -> Result<i64> {
    let l_max = qg.graph().max_edge_length();
    let eta = 0.5 / l_max;
    let step = PI / (4.0 * l_max * qg.bond_count() as f64);
    let corners = [
        Complex64::new(a, -eta),
        Complex64::new(b, -eta),
        Complex64::new(b, eta),
        Complex64::new(a, eta),
    ];
    let f = |z: Complex64| qg.secular_det_complex(z);
    let mut total = 0.0;
    for side in 0..4 {
        let (z0, z1) = (corners[side], corners[(side + 1) % 4]);
        // vertical sides cross the real axis, where zeros may sit close by
        let h = if side % 2 == 1 { step / 16.0 } else { step };
        let pieces = (((z1 - z0).norm() / h).ceil() as usize).max(1);
        let nodes: Vec<Complex64> = (0..=pieces)
            .map(|i| z0 + (z1 - z0) * (i as f64 / pieces as f64))
            .collect();
        let values: Vec<Complex64> = nodes.par_iter().map(|&z| f(z)).collect();
        let turns: Vec<f64> = (0..pieces)
            .into_par_iter()
            .map(|i| wind(&f, nodes[i], values[i], nodes[i + 1], values[i + 1], 0))
            .collect::<Result<_>>()?;
        total += turns.iter().sum::<f64>();
    }
    let winding = total / TAU;
    let n = winding.round();
    if (winding - n).abs() > 0.05 {
        return Err(Error::WindingNotInteger {
            k0: a,
            k1: b,
            winding,
        });
    }
    Ok(n as i64)
}

fn wind<F: Fn(Complex64) -> Complex64>(
    f: &F,
    z0: Complex64,
    f0: Complex64,
    z1: Complex64,
    f1: Complex64,
    depth: u32,
) -> Result<f64> {
    let whole = (f1 / f0).arg();
    let zm = 0.5 * (z0 + z1);
    let fm = f(zm);
    let (left, right) = ((fm / f0).arg(), (f1 / fm).arg());
    let small = whole.abs() < PI / 4.0 && left.abs() < PI / 8.0 && right.abs() < PI / 8.0;
    if small && (left + right - whole).abs() < 1e-6 {
        return Ok(left + right);
    }
    if depth >= 48 {
        return Err(Error::WindingNotInteger {
            k0: z0.re,
            k1: z1.re,
            winding: f64::NAN,
        });
    }
    Ok(wind(f, z0, f0, zm, fm, depth + 1)? + wind(f, zm, fm, z1, f1, depth + 1)?)
}

pub fn eigenvalues_in(qg: &QuantumGraph, k0: f64, k1: f64, tol: f64) -> Result<Spectrum> {
    eigenvalues_with(
        qg,
        k0,
        k1,
        &SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

/// All eigenvalues in `(max(k0, 0), k1]` with multiplicities, certified.
pub fn eigenvalues_with(
    qg: &QuantumGraph,
    k0: f64,
    k1: f64,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    if !(k0 >= 0.0 && k1 > k0 && k1.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= k0 < k1, got ({k0}, {k1}]"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", opts.tol)));
    }
    let g = qg.graph();
    let (l_min, l_max) = (g.min_edge_length(), g.max_edge_length());
    let step = grid_spacing(qg, opts);
    let resolution = opts.phase_threshold / l_min;
    let width = opts
        .tol
        .min(0.1 * opts.phase_threshold / l_max)
        .max(8.0 * f64::EPSILON * k1.max(1.0));

    let a = if k0 - resolution - step > 0.0 {
        safe_point(qg, k0 - resolution, -1.0, step)
    } else {
        start_near_zero(qg, step)
    };
    let b = safe_point(qg, k1 + resolution, 1.0, step);

    let counter = Counter::new(qg, a);
    let cells = (((b - a) / step).ceil() as usize).max(1);
    let nodes: Vec<f64> = (0..=cells)
        .map(|i| if i == cells { b } else { a + (b - a) * i as f64 / cells as f64 })
        .collect();
    let counts: Vec<i64> = nodes
        .par_iter()
        .map(|&k| counter.count(k))
        .collect::<Result<_>>()?;
    let jumps: Vec<Vec<(f64, i64)>> = (0..cells)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            counter.bisect(nodes[i], nodes[i + 1], counts[i], counts[i + 1], width, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut jumps: Vec<(f64, i64)> = jumps.into_iter().flatten().collect();
    jumps.sort_by(|x, y| x.0.total_cmp(&y.0));

    // cluster crossings the phase threshold cannot separate
    let mut clusters: Vec<Vec<(f64, i64)>> = Vec::new();
    for jump in jumps {
        match clusters.last_mut() {
            Some(last) if jump.0 - last.last().unwrap().0 <= resolution => last.push(jump),
            _ => clusters.push(vec![jump]),
        }
    }
    let mut entries: Vec<SpectrumEntry> = clusters
        .par_iter()
        .map(|cluster| {
            let weight: i64 = cluster.iter().map(|j| j.1.abs()).sum();
            let k = cluster.iter().map(|j| j.0 * j.1.abs() as f64).sum::<f64>() / weight as f64;
            let multiplicity = phases_near_zero(&eigenphases(qg, k), opts.phase_threshold);
            SpectrumEntry { k, multiplicity }
        })
        .collect();
    entries.retain(|e| e.multiplicity > 0);

    let reported: usize = entries.iter().map(|e| e.multiplicity).sum();
    let counted = argument_count(qg, a, b)?;
    if reported as i64 != counted {
        return Err(Error::CertificationMismatch {
            k0: a,
            k1: b,
            reported,
            counted,
        });
    }

    let spectrum = Spectrum {
        k0,
        k1,
        entries,
        resolution,
        phase_threshold: opts.phase_threshold,
        tol: opts.tol,
        certified_count: counted,
        scan_start: a,
        scan_end: b,
    };
    Ok(spectrum.restricted(k0, k1))
}

/// `m_G(k)`: total multiplicity of eigenvalues within `tol` of `k`.
pub fn multiplicity(qg: &QuantumGraph, k: f64, tol: f64) -> Result<usize> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("multiplicity needs k > 0, got {k}")));
    }
    let pad = 4.0 * PHASE_THRESHOLD / qg.graph().min_edge_length() + tol;
    let spec = eigenvalues_in(qg, (k - pad).max(0.0), k + pad, tol.min(DEFAULT_TOL))?;
    Ok(spec.multiplicity_near(k, tol + 0.5 * spec.resolution))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroData {
    /// Multiplicity of the eigenvalue zero.
    pub m0: usize,
    /// Order of the zero of `det(Id - U(k))` at `k = 0`.
    pub n: usize,
}

/// Affine solutions `f_e(x) = α_e + β_e x` of `AF + BF' = 0`.
pub fn zero_eigenvalue_multiplicity(qg: &QuantumGraph) -> Result<usize> {
    let g = qg.graph();
    let e = g.edge_count();
    let (a, b) = qg.bc().global_pair(g)?;
    let n = 2 * e;
    // unknowns (α_1..α_E, β_1..β_E); F = (α, α + Lβ), F' = (β, -β)
    let mut m = CMatrix::zeros(n, n);
    for r in 0..n {
        for j in 0..e {
            let len = g.edges()[j].length;
            m[(r, j)] = a[(r, j)] + a[(r, e + j)];
            m[(r, e + j)] = a[(r, e + j)] * len + b[(r, j)] - b[(r, e + j)];
        }
    }
    Ok(linalg::nullity(&m, 1e-10))
}

/// Order of vanishing of the secular determinant at 0 from the slopes of
/// `log|det|` on `h, 2h, 4h`, with a Richardson-extrapolated estimate that
/// must agree on two consecutive refinements.
pub fn zero_order(qg: &QuantumGraph) -> Result<usize> {
    let l_max = qg.graph().max_edge_length();
    let log_det = |h: f64| qg.secular_det(h).norm().log2();
    let mut estimates = Vec::new();
    let mut previous: Option<i64> = None;
    let mut h = 0.2 / l_max;
    for _ in 0..10 {
        let (d1, d2, d4) = (log_det(h), log_det(2.0 * h), log_det(4.0 * h));
        if !(d1.is_finite() && d2.is_finite() && d4.is_finite()) {
            break;
        }
        let e1 = d2 - d1;
        let e2 = d4 - d2;
        let extrapolated = 2.0 * e1 - e2;
        estimates.push(extrapolated);
        let n = extrapolated.round();
        let consistent = n >= 0.0 && (extrapolated - n).abs() < 0.05 && (e1 - n).abs() < 0.25;
        if consistent {
            if previous == Some(n as i64) {
                return Ok(n as usize);
            }
            previous = Some(n as i64);
        } else {
            previous = None;
        }
        // stop before the determinant sinks into roundoff
        if d1 < -40.0 {
            break;
        }
        h /= 2.0;
    }
    Err(Error::ZeroOrderFit { estimates })
}

pub fn zero_modes(qg: &QuantumGraph) -> Result<ZeroData> {
    Ok(ZeroData {
        m0: zero_eigenvalue_multiplicity(qg)?,
        n: zero_order(qg)?,
    })
}

/// Winding of `det(Id - U)` around a small circle at 0: an independent
/// estimate of the order of the zero there.
pub fn zero_order_by_winding(qg: &QuantumGraph) -> Result<usize> {
    let l_max = qg.graph().max_edge_length();
    let step = PI / (4.0 * l_max * qg.bond_count() as f64);
    let radius = start_near_zero(qg, step);
    let f = |z: Complex64| qg.secular_det_complex(z);
    let pieces = 64;
    let nodes: Vec<Complex64> = (0..=pieces)
        .map(|i| Complex64::from_polar(radius, TAU * i as f64 / pieces as f64))
        .collect();
    let mut total = 0.0;
    for i in 0..pieces {
        total += wind(&f, nodes[i], f(nodes[i]), nodes[i + 1], f(nodes[i + 1]), 0)?;
    }
    let w = total / TAU;
    if (w - w.round()).abs() > 0.05 || w.round() < 0.0 {
        return Err(Error::WindingNotInteger {
            k0: -radius,
            k1: radius,
            winding: w,
        });
    }
    Ok(w.round() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylReport {
    pub k0: f64,
    pub k1: f64,
    pub count: usize,
    pub prediction: f64,
    pub deficit: f64,
    pub bound: usize,
    pub pass: bool,
}

/// Compare the eigenvalue count of `spectrum` with `𝓛 (K1 - K0) / π`.
pub fn weyl_check(qg: &QuantumGraph, spectrum: &Spectrum) -> WeylReport {
    let count = spectrum.count();
    let prediction = qg.total_length() * (spectrum.k1 - spectrum.k0) / PI;
    let deficit = (count as f64 - prediction).abs();
    let bound = qg.bond_count();
    WeylReport {
        k0: spectrum.k0,
        k1: spectrum.k1,
        count,
        prediction,
        deficit,
        bound,
        pass: deficit < bound as f64,
    }
}
