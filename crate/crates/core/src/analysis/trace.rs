//! Both sides of the trace formula
//!
//! ```text
//! Σ_{k>0} m_G(k) φ(k) = C₀ 𝓛 φ̂(0) - ½ N φ(0) + Σ_{l>0} A_G(l) φ̂(l)
//! ```
//!
//! truncated at `K_max` and `L_max`, with certified bounds for what the
//! truncation drops.

use std::f64::consts::PI;

use serde::Serialize;

use crate::analysis::test_function::{gaussian_test, Decay, TestFunction};
use crate::eigensolver::{self, Spectrum, ZeroData};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::orbits::{self, BondGraph, Grouping, LengthSpectrum};
use crate::scattering::QuantumGraph;

/// `C₀`, fixed by the circle: with `𝓛 = 2π` the formula must reduce to
/// Poisson summation. `calibrate_volume_coefficient` recomputes it.
pub const VOLUME_COEFFICIENT: f64 = 1.0;
/// Slack added to the tails when deciding pass/fail.
pub const RESIDUAL_SLACK: f64 = 1e-8;
/// Default target for each automatically chosen tail.
pub const TAIL_TARGET: f64 = 1e-8;
/// Refinement used for eigenvalues entering the spectral sum.
const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub test_function: String,
    pub k_max: f64,
    pub l_max: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tail_lhs: f64,
    pub tail_rhs: f64,
    pub volume_term: f64,
    pub zero_term: f64,
    pub orbit_term: f64,
    pub eigenvalue_count: usize,
    pub length_entries: usize,
    pub zero: ZeroData,
    pub pass: bool,
}

/// Bound for `Σ_{k > K} m_G(k) |φ(k)|`.
///
/// Windows of width `π/𝓛` hold at most `1 + 2E` eigenvalues by the Weyl
/// bound, and the envelope is nonincreasing, so the sum is at most
/// `(1 + 2E) (env(K) + (𝓛/π) ∫_K^∞ env)`.
pub fn lhs_tail(graph: &MetricGraph, phi: &TestFunction, k_max: f64) -> Result<f64> {
    let decay = phi.phi_decay();
    if let Decay::CompactSupport { radius, .. } = decay {
        if k_max >= radius {
            return Ok(0.0);
        }
    }
    let per_window = 1.0 + graph.bond_count() as f64;
    let density = graph.total_length() / PI;
    Ok(per_window * (decay.envelope(k_max) + density * decay.tail_integral(k_max)))
}

/// Bound for `Σ_{l > L} |A_G(l)| |φ̂(l)|`.
///
/// Orbits of `n` bonds have lengths in `[n ℓ_min, n ℓ_max]`, and their
/// `|A_p|` sum to at most `ℓ_max tr |M|^n`, where `|M|` is the entrywise
/// absolute transfer matrix. Terms past the explicit range are bounded by
/// `2E ρ^n` with `ρ` the largest column sum of `|M|` and summed as a
/// geometric series once the ratio drops below 1/2.
pub fn rhs_tail(graph: &MetricGraph, bonds: &BondGraph, phi: &TestFunction, l_max: f64) -> Result<f64> {
    let decay = phi.phi_hat_decay();
    let rate = match decay {
        Decay::CompactSupport { radius, .. } => {
            return if l_max >= radius {
                Ok(0.0)
            } else {
                Err(Error::TailsNotCertifiable(format!(
                    "l_max = {l_max} is below the support radius {radius} of the transform"
                )))
            };
        }
        Decay::Polynomial { .. } => {
            return Err(Error::TailsNotCertifiable(
                "orbit sums grow exponentially; the transform needs Gaussian decay".into(),
            ))
        }
        Decay::Gaussian { rate, .. } => rate,
    };
    let (l_min, l_top) = (graph.min_edge_length(), graph.max_edge_length());
    let m = bonds.abs_transfer();
    let dim = m.nrows() as f64;
    let rho = (0..m.ncols())
        .map(|j| m.column(j).sum())
        .fold(0.0, f64::max)
        .max(1.0);
    // bound for the n-bond term once n ℓ_min >= l_max
    let bound = |n: usize| -> f64 {
        let x = (n as f64 * l_min).max(l_max);
        ((l_top * dim).ln() + n as f64 * rho.ln() + decay.envelope(x).ln()).exp()
    };
    let ratio = |n: usize| rho * (-rate * l_min * l_min * (2 * n + 1) as f64).exp();
    // `settled` is independent of l_max, which keeps the bound nonincreasing in l_max
    let mut settled = 1;
    while !(ratio(settled) <= 0.5 && bound(settled + 1) < 1e-30) {
        settled += 1;
        if settled > 100_000 {
            return Err(Error::TailsNotCertifiable("orbit tail series did not settle".into()));
        }
    }
    let first = (l_max / l_top).floor() as usize + 1;
    let stop = settled.max((l_max / l_min).floor() as usize + 1);
    if stop > 100_000 {
        return Err(Error::TailsNotCertifiable(format!("l_max = {l_max} needs too many terms")));
    }
    let mut power = m.clone();
    let mut total = 0.0;
    for n in 1..=stop {
        if n >= first {
            let x = (n as f64 * l_min).max(l_max);
            let explicit = l_top * power.trace() * decay.envelope(x);
            total += if explicit.is_finite() { explicit } else { bound(n) };
        }
        if n < stop {
            power = &m * &power;
        }
    }
    Ok(total + 2.0 * bound(stop + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sides {
    pub lhs: f64,
    pub volume_term: f64,
    pub zero_term: f64,
    pub orbit_term: f64,
}

impl Sides {
    pub fn rhs(&self) -> f64 {
        self.volume_term + self.zero_term + self.orbit_term
    }
}

/// Evaluate the truncated sums from precomputed data.
pub fn trace_sides(
    total_length: f64,
    spectrum: &Spectrum,
    lengths: &LengthSpectrum,
    zero: ZeroData,
    phi: &TestFunction,
    coefficient: f64,
) -> Sides {
    let lhs = spectrum
        .entries
        .iter()
        .map(|e| e.multiplicity as f64 * phi.phi(e.k))
        .sum();
    let orbit_term = lengths
        .entries
        .iter()
        .filter(|e| e.length <= lengths.cutoff * (1.0 + 1e-12))
        .map(|e| e.weight * phi.phi_hat(e.length))
        .sum();
    Sides {
        lhs,
        volume_term: coefficient * total_length * phi.phi_hat(0.0),
        zero_term: -0.5 * zero.n as f64 * phi.phi(0.0),
        orbit_term,
    }
}

pub fn trace_check(qg: &QuantumGraph, phi: &TestFunction, k_max: f64, l_max: f64) -> Result<TraceReport> {
    if !(k_max > 0.0 && l_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "trace check needs positive cutoffs, got k_max = {k_max}, l_max = {l_max}"
        )));
    }
    let graph = qg.graph();
    let bonds = BondGraph::new(qg);
    let tail_lhs = lhs_tail(graph, phi, k_max)?;
    let tail_rhs = rhs_tail(graph, &bonds, phi, l_max)?;
    let spectrum = eigensolver::eigenvalues_in(qg, 0.0, k_max, SUM_TOL)?;
    let primitives = orbits::primitive_orbits_with(&bonds, orbits::Cutoff::Length(l_max), orbits::DEFAULT_BUDGET)?;
    let edge_lengths: Vec<f64> = graph.edges().iter().map(|e| e.length).collect();
    let lengths = orbits::length_spectrum_from(&primitives, &edge_lengths, l_max, Grouping::Exact);
    let zero = eigensolver::zero_modes(qg)?;
    let sides = trace_sides(graph.total_length(), &spectrum, &lengths, zero, phi, VOLUME_COEFFICIENT);
    let rhs = sides.rhs();
    let residual = (sides.lhs - rhs).abs();
    Ok(TraceReport {
        test_function: phi.name().to_string(),
        k_max,
        l_max,
        lhs: sides.lhs,
        rhs,
        residual,
        tail_lhs,
        tail_rhs,
        volume_term: sides.volume_term,
        zero_term: sides.zero_term,
        orbit_term: sides.orbit_term,
        eigenvalue_count: spectrum.count(),
        length_entries: lengths.entries.len(),
        zero,
        pass: residual <= tail_lhs + tail_rhs + RESIDUAL_SLACK,
    })
}

/// Smallest cutoff (to about 0.1%) at which a nonincreasing tail drops to
/// `target`, never below `start`.
fn cutoff_for(mut tail: impl FnMut(f64) -> Result<f64>, start: f64, target: f64) -> Result<f64> {
    if tail(start)? <= target {
        return Ok(start);
    }
    let mut hi = start;
    while tail(hi)? > target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::TailsNotCertifiable(format!(
                "no cutoff below 1e6 reaches tail target {target:e}"
            )));
        }
    }
    let mut lo = 0.5 * hi;
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if tail(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `(K_max, L_max)` with both tail bounds at most `target`.
pub fn auto_cutoffs(qg: &QuantumGraph, phi: &TestFunction, target: f64) -> Result<(f64, f64)> {
    let graph = qg.graph();
    let bonds = BondGraph::new(qg);
    let k = cutoff_for(|k| lhs_tail(graph, phi, k), 1.0, target)?;
    let l = cutoff_for(|l| rhs_tail(graph, &bonds, phi, l), graph.max_edge_length(), target)?;
    Ok((k, l))
}

pub fn trace_check_auto(qg: &QuantumGraph, phi: &TestFunction, target: f64) -> Result<TraceReport> {
    let (k, l) = auto_cutoffs(qg, phi, target)?;
    trace_check(qg, phi, k, l)
}

/// `C₀` solved from the circle of length 2π with `φ(x) = e^{-x²}`.
pub fn calibrate_volume_coefficient() -> Result<f64> {
    let graph = MetricGraph::from_edges(1, &[(0, 0, 2.0 * PI)])?;
    let qg = QuantumGraph::kirchhoff(graph)?;
    let phi = gaussian_test(1.0)?;
    let (k, l) = auto_cutoffs(&qg, &phi, 1e-14)?;
    let spectrum = eigensolver::eigenvalues_in(&qg, 0.0, k, SUM_TOL)?;
    let lengths = orbits::length_spectrum(&qg, l, Grouping::Exact)?;
    let zero = eigensolver::zero_modes(&qg)?;
    let unit = trace_sides(qg.total_length(), &spectrum, &lengths, zero, &phi, 1.0);
    Ok((unit.lhs - unit.zero_term - unit.orbit_term) / unit.volume_term)
}

/// Trace formula for the difference of two graphs: spectral side minus
/// spectral side against geometric side minus geometric side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferenceReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tails: f64,
    pub pass: bool,
}

pub fn trace_difference(a: &TraceReport, b: &TraceReport) -> DifferenceReport {
    let lhs = a.lhs - b.lhs;
    let rhs = a.rhs - b.rhs;
    let residual = (lhs - rhs).abs();
    let tails = a.tail_lhs + a.tail_rhs + b.tail_lhs + b.tail_rhs;
    DifferenceReport {
        lhs,
        rhs,
        residual,
        tails,
        pass: residual <= tails + RESIDUAL_SLACK,
    }
}
