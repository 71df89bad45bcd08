//! Small dense complex helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
}

pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Spectral norm estimate by power iteration on `m* m`.
///
/// Starts from a fixed, non-symmetric vector so results are reproducible.
/// The estimate is a lower bound that converges from below; callers that
/// need a guarantee combine it with `max_norm` as a pre-check.
pub fn spectral_norm_estimate(m: &CMatrix, iterations: usize) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    let mut v = nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|j| c(1.0 + 0.37 * j as f64, 0.11 * (j % 3) as f64)),
    );
    let mut sigma = 0.0;
    for _ in 0..iterations.max(1) {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v /= c(norm, 0.0);
        let w = m * &v;
        sigma = w.norm();
        v = m.adjoint() * w;
    }
    sigma
}

/// Norm used for the matrix invariants: the larger of the max-entry norm and
/// a five-step power-iteration estimate of the spectral norm.
pub fn matrix_norm(m: &CMatrix) -> f64 {
    max_norm(m).max(spectral_norm_estimate(m, 5))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank with threshold `rel * sigma_max`.
pub fn rank(m: &CMatrix, rel: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > rel * top).count(),
        _ => 0,
    }
}

/// Kernel dimension of a square or wide system using the same threshold as `rank`.
pub fn nullity(m: &CMatrix, rel: f64) -> usize {
    m.ncols() - rank(m, rel)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Angle of `z` mapped into `[0, 2π)`.
pub fn phase_0_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Distance of an angle to 0 on the circle.
pub fn circular_distance_to_zero(theta: f64) -> f64 {
    let t = theta.rem_euclid(std::f64::consts::TAU);
    t.min(std::f64::consts::TAU - t)
}
