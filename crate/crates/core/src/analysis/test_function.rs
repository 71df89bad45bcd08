//! Even test functions `φ` paired with `φ̂(ξ) = (1/2π) ∫ e^{iξx} φ(x) dx`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Pointwise envelope for `|f(x)|`, `x >= 0`, nonincreasing in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decay {
    /// `|f(x)| <= scale · exp(-rate x²)`.
    Gaussian { scale: f64, rate: f64 },
    /// `|f(x)| <= c3 (1 + |x|)^{-3}`.
    Polynomial { c3: f64 },
    /// `f` vanishes for `|x| > radius`; `bound` is `sup |f|`.
    CompactSupport { radius: f64, bound: f64 },
}

impl Decay {
    pub fn envelope(&self, x: f64) -> f64 {
        let x = x.abs();
        match *self {
            Decay::Gaussian { scale, rate } => scale * (-rate * x * x).exp(),
            Decay::Polynomial { c3 } => c3 / (1.0 + x).powi(3),
            Decay::CompactSupport { radius, bound } => {
                if x > radius {
                    0.0
                } else {
                    bound
                }
            }
        }
    }

    /// Upper bound for `∫_a^∞ envelope`, `a >= 0`.
    pub fn tail_integral(&self, a: f64) -> f64 {
        let a = a.max(0.0);
        match *self {
            Decay::Gaussian { scale, rate } => {
                if a > 0.0 {
                    // ∫_a^∞ e^{-r u²} du <= e^{-r a²} / (2 r a)
                    let mills = (-rate * a * a).exp() / (2.0 * rate * a);
                    scale * mills.min(0.5 * (PI / rate).sqrt())
                } else {
                    scale * 0.5 * (PI / rate).sqrt()
                }
            }
            Decay::Polynomial { c3 } => c3 / (2.0 * (1.0 + a).powi(2)),
            Decay::CompactSupport { radius, bound } => bound * (radius - a).max(0.0),
        }
    }
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct TestFunction {
    name: String,
    phi: Eval,
    phi_hat: Eval,
    phi_decay: Decay,
    phi_hat_decay: Decay,
    c3: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("phi_decay", &self.phi_decay)
            .field("phi_hat_decay", &self.phi_hat_decay)
            .field("c3", &self.c3)
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi_hat: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi_decay: Decay,
        phi_hat_decay: Decay,
        c3: f64,
    ) -> Self {
        Self {
            name: name.into(),
            phi: Arc::new(phi),
            phi_hat: Arc::new(phi_hat),
            phi_decay,
            phi_hat_decay,
            c3,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn phi_hat(&self, xi: f64) -> f64 {
        (self.phi_hat)(xi)
    }

    pub fn phi_decay(&self) -> Decay {
        self.phi_decay
    }

    pub fn phi_hat_decay(&self) -> Decay {
        self.phi_hat_decay
    }

    /// `|φ(x)| <= c3 (1 + |x|)^{-3}` on the real line.
    pub fn c3(&self) -> f64 {
        self.c3
    }

    /// Largest `|φ(x) - φ(-x)|` over the given points.
    pub fn evenness_defect(&self, points: &[f64]) -> f64 {
        points
            .iter()
            .map(|&x| (self.phi(x) - self.phi(-x)).abs())
            .fold(0.0, f64::max)
    }
}

/// `φ(x) = e^{-t x²}`, `φ̂(ξ) = (1/2π) √(π/t) e^{-ξ²/4t}`.
pub fn gaussian_test(t: f64) -> Result<TestFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("gaussian width t must be positive, got {t}")));
    }
    let hat_scale = (PI / t).sqrt() / (2.0 * PI);
    // max of (1+x)³ e^{-t x²} is at 2t x² + 2t x - 3 = 0
    let x = (-2.0 * t + (4.0 * t * t + 24.0 * t).sqrt()) / (4.0 * t);
    let c3 = (1.0 + x).powi(3) * (-t * x * x).exp();
    Ok(TestFunction::new(
        format!("gaussian(t={t})"),
        move |x| (-t * x * x).exp(),
        move |xi| hat_scale * (-xi * xi / (4.0 * t)).exp(),
        Decay::Gaussian { scale: 1.0, rate: t },
        Decay::Gaussian {
            scale: hat_scale,
            rate: 1.0 / (4.0 * t),
        },
        c3 * (1.0 + 1e-12),
    ))
}

/// Base bump `ψ(x) = exp(1 - 1/(1 - x²))` on `(-1, 1)`.
pub fn bump(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / s).exp()
    }
}

/// `ψ'''(x)`, from `ψ = e^g` with `g = 1 - 1/(1 - x²)`.
pub fn bump_third_derivative(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        return 0.0;
    }
    let g1 = -2.0 * x / (s * s);
    let g2 = -2.0 / (s * s) - 8.0 * x * x / (s * s * s);
    let g3 = -24.0 * x / (s * s * s) - 48.0 * x * x * x / (s * s * s * s);
    (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * bump(x)
}

const BUMP_QUAD_TOL: f64 = 1e-10;

// The double-exponential rule can stop early with an optimistic estimate on
// these integrands; Clenshaw-Curtis at a tighter target does not.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, target: f64) -> Result<f64> {
    let out = quadrature::clenshaw_curtis::integrate(f, a, b, 1e-3 * target);
    if !(out.error_estimate <= target) || !out.integral.is_finite() {
        return Err(Error::Quadrature {
            estimate: out.error_estimate,
            target,
        });
    }
    Ok(out.integral)
}

/// `ψ̂(η) = (1/π) ∫_0^1 ψ(u) cos(ηu) du`, split into half-oscillations.
pub fn bump_hat(eta: f64) -> Result<f64> {
    let pieces = ((eta.abs() / PI).ceil() as usize).max(1);
    let target = BUMP_QUAD_TOL / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let (a, b) = (i as f64 / pieces as f64, (i + 1) as f64 / pieces as f64);
        total += integrate(|u| bump(u) * (eta * u).cos(), a, b, target)?;
    }
    Ok(total / PI)
}

fn bump_hat_or_nan(eta: f64) -> f64 {
    bump_hat(eta).unwrap_or(f64::NAN)
}

/// `‖ψ‖₁` and `‖ψ'''‖₁`.
fn bump_norms() -> Result<(f64, f64)> {
    let l1 = 2.0 * integrate(bump, 0.0, 1.0, 1e-12)?;
    // integrate ψ''' between its sign changes on [0, 1)
    let n = 4000;
    let mut nodes = vec![0.0];
    for i in 0..n - 1 {
        let (mut a, mut b) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
        if i > 0 && bump_third_derivative(a).signum() != bump_third_derivative(b).signum() {
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if bump_third_derivative(a).signum() == bump_third_derivative(m).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            nodes.push(0.5 * (a + b));
        }
    }
    nodes.push(1.0);
    let mut d3 = 0.0;
    for w in nodes.windows(2) {
        d3 += integrate(bump_third_derivative, w[0], w[1], 1e-10)?.abs();
    }
    Ok((l1, 2.0 * d3))
}

/// `|ψ̂(η)| <= C (1 + |η|)^{-3}`: `|ψ̂| <= ‖ψ‖₁/2π` and `|η|³ |ψ̂| <= ‖ψ'''‖₁/2π`.
fn bump_hat_c3() -> Result<f64> {
    let (l1, d3) = bump_norms()?;
    Ok(8.0 * l1.max(d3) / (2.0 * PI) * (1.0 + 1e-6))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpMode {
    /// `φ̂ = ψ_K(l) = ψ(K(l - l0)) + ψ(K(l + l0))`, `φ(x) = (4π/K) ψ̂(x/K) cos(l0 x)`.
    Localized,
    /// `φ̂ = ψ_L(l) = (2/L) ψ(l/L) cos(k0 l)`, `φ(k) = 2π [ψ̂(L(k - k0)) + ψ̂(L(k + k0))]`.
    Dual,
}

/// Bump-based pair. In `Localized` mode `center` is `l0` and `scale` is the
/// sharpness `K`; in `Dual` mode they are `k0` and the width `L`.
pub fn bump_test(center: f64, scale: f64, mode: BumpMode) -> Result<TestFunction> {
    if !(center >= 0.0 && center.is_finite() && scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bump test needs center >= 0 and scale > 0, got ({center}, {scale})"
        )));
    }
    let hat_c3 = bump_hat_c3()?;
    // probe the quadrature once so evaluations later cannot fail silently
    for eta in [0.0, 1.0, 10.0, 100.0] {
        bump_hat(eta)?;
    }
    let tf = match mode {
        BumpMode::Localized => {
            let (l0, k) = (center, scale);
            TestFunction::new(
                format!("bump(l0={l0}, K={k})"),
                move |x| 4.0 * PI / k * bump_hat_or_nan(x / k) * (l0 * x).cos(),
                move |l| bump(k * (l - l0)) + bump(k * (l + l0)),
                Decay::Polynomial {
                    c3: 4.0 * PI / k * hat_c3 * k.max(1.0).powi(3),
                },
                Decay::CompactSupport {
                    radius: l0 + 1.0 / k,
                    bound: 2.0,
                },
                4.0 * PI / k * hat_c3 * k.max(1.0).powi(3),
            )
        }
        BumpMode::Dual => {
            let (k0, len) = (center, scale);
            // 1 + L|k ∓ k0| >= min(1, L) (1 + |k|) / (1 + k0)
            let c3 = 2.0 * PI * hat_c3 * 2.0 * (1.0 + k0).powi(3) * (1.0 / len).max(1.0).powi(3);
            TestFunction::new(
                format!("bump_dual(k0={k0}, L={len})"),
                move |k| 2.0 * PI * (bump_hat_or_nan(len * (k - k0)) + bump_hat_or_nan(len * (k + k0))),
                move |l| 2.0 / len * bump(l / len) * (k0 * l).cos(),
                Decay::Polynomial { c3 },
                Decay::CompactSupport {
                    radius: len,
                    bound: 2.0 / len,
                },
                c3,
            )
        }
    };
    Ok(tf)
}

/// Forward transform of `ψ_K`: `(1/2π) ∫ e^{iξx} ψ_K(ξ) dξ = (2/K) ψ̂(x/K) cos(l0 x)`.
pub fn localized_bump_transform(l0: f64, k: f64, x: f64) -> Result<f64> {
    Ok(2.0 / k * bump_hat(x / k)? * (l0 * x).cos())
}
