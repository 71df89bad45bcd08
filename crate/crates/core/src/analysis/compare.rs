//! Density functionals comparing two graphs:
//! `(1/K) Σ_{k ≤ K} |m_G(k) - m_G'(k)|` and `(1/L) Σ_{l ≤ L} |A_G(l) - A_G'(l)|`.

use serde::Serialize;

use crate::eigensolver::{self, Spectrum, ZeroData, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::orbits::{self, Grouping, LengthSpectrum, DEFAULT_EPS};
use crate::scattering::QuantumGraph;

/// Densities at or below this count as vanishing in verdicts.
pub const DENSITY_ZERO: f64 = 1e-9;

/// Sum of `|value_a - value_b|` over the union of locations, matching
/// points closer than `eps`. Both inputs must be sorted by location.
fn paired_abs_difference(a: &[(f64, f64)], b: &[(f64, f64)], eps: f64) -> Result<f64> {
    let window = |list: &[(f64, f64)], x: f64| {
        let lo = list.partition_point(|p| p.0 < x - eps);
        let hi = list.partition_point(|p| p.0 <= x + eps);
        lo..hi
    };
    let mut b_used = vec![false; b.len()];
    let mut total = 0.0;
    for &(x, va) in a {
        let range = window(b, x);
        if range.len() > 1 {
            return Err(Error::AmbiguousPairing {
                location: x,
                candidates: range.len(),
                eps,
            });
        }
        match range.clone().next() {
            Some(j) => {
                let back = window(a, b[j].0);
                if back.len() > 1 {
                    return Err(Error::AmbiguousPairing {
                        location: b[j].0,
                        candidates: back.len(),
                        eps,
                    });
                }
                b_used[j] = true;
                total += (va - b[j].1).abs();
            }
            None => total += va.abs(),
        }
    }
    for (j, &(_, vb)) in b.iter().enumerate() {
        if !b_used[j] {
            total += vb.abs();
        }
    }
    Ok(total)
}

/// `(1/K) Σ_{k ∈ (0, K]} |m_G(k) - m_G'(k)|`, pairing eigenvalues within
/// ten times the coarser of the two k-resolutions. An eigenvalue counts as
/// inside when it lies within half a resolution of `K`.
pub fn eig_density_diff(a: &Spectrum, b: &Spectrum, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("density window must be positive, got {k}")));
    }
    let eps = 10.0 * a.resolution.max(b.resolution);
    // same half-open boundary rule as the solver
    let edge = k + 0.5 * a.resolution.max(b.resolution);
    let pick = |s: &Spectrum| -> Vec<(f64, f64)> {
        s.entries
            .iter()
            .filter(|e| e.k > 0.0 && e.k <= edge)
            .map(|e| (e.k, e.multiplicity as f64))
            .collect()
    };
    Ok(paired_abs_difference(&pick(a), &pick(b), eps)? / k)
}

fn grouping_eps(ls: &LengthSpectrum) -> f64 {
    match ls.grouping {
        Grouping::Numeric { eps } => eps,
        Grouping::Exact => DEFAULT_EPS,
    }
}

/// `(1/L) Σ_{l ∈ (0, L]} |A_G(l) - A_G'(l)|`. Exact-mode inputs are first
/// regrouped numerically so that equal lengths with different traversal
/// vectors merge.
pub fn len_density_diff(a: &LengthSpectrum, b: &LengthSpectrum, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::InvalidParameter(format!("density window must be positive, got {l}")));
    }
    let eps = grouping_eps(a).max(grouping_eps(b));
    let pick = |s: &LengthSpectrum| -> Vec<(f64, f64)> {
        let merged = match s.grouping {
            Grouping::Exact => s.regroup(eps),
            Grouping::Numeric { .. } => s.clone(),
        };
        merged
            .entries
            .iter()
            .filter(|e| e.length > 0.0 && e.length <= l)
            .map(|e| (e.length, e.weight))
            .collect()
    };
    Ok(paired_abs_difference(&pick(a), &pick(b), eps)? / l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Both densities vanish and the zero data agree.
    Isospectral,
    /// Both densities vanish; the eigenvalue zero differs.
    IsospectralAwayFromZero,
    /// At least one density is bounded away from zero.
    Different,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub k: f64,
    pub l: f64,
    pub total_length_a: f64,
    pub total_length_b: f64,
    pub total_lengths_equal: bool,
    pub eig_density: f64,
    pub len_density: f64,
    pub zero_a: ZeroData,
    pub zero_b: ZeroData,
    pub verdict: Verdict,
}

pub fn compare(a: &QuantumGraph, b: &QuantumGraph, k: f64, l: f64) -> Result<CompareReport> {
    let grouping = Grouping::Numeric { eps: DEFAULT_EPS };
    let spec_a = eigensolver::eigenvalues_in(a, 0.0, k, DEFAULT_TOL)?;
    let spec_b = eigensolver::eigenvalues_in(b, 0.0, k, DEFAULT_TOL)?;
    let ls_a = orbits::length_spectrum(a, l, grouping)?;
    let ls_b = orbits::length_spectrum(b, l, grouping)?;
    let zero_a = eigensolver::zero_modes(a)?;
    let zero_b = eigensolver::zero_modes(b)?;
    let eig_density = eig_density_diff(&spec_a, &spec_b, k)?;
    let len_density = len_density_diff(&ls_a, &ls_b, l)?;
    let (la, lb) = (a.total_length(), b.total_length());
    let vanishing = eig_density <= DENSITY_ZERO && len_density <= DENSITY_ZERO;
    let verdict = match (vanishing, zero_a == zero_b) {
        (true, true) => Verdict::Isospectral,
        (true, false) => Verdict::IsospectralAwayFromZero,
        (false, _) => Verdict::Different,
    };
    Ok(CompareReport {
        k,
        l,
        total_length_a: la,
        total_length_b: lb,
        total_lengths_equal: (la - lb).abs() <= 1e-9 * la.max(lb),
        eig_density,
        len_density,
        zero_a,
        zero_b,
        verdict,
    })
}
