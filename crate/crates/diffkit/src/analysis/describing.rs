//! Describing-function linearization of the nonlinear differentiators: each
//! power-law feedback term is replaced by its amplitude-dependent equivalent
//! gain, giving a second-order linear model with a natural frequency and a
//! damping ratio per probe amplitude.

use std::sync::OnceLock;

use crate::differentiators::{HybridParams, LevantParams, LinearParams};

const GL_N: usize = 64;

/// Gauss-Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gl64() -> &'static ([f64; GL_N], [f64; GL_N]) {
    static CACHE: OnceLock<([f64; GL_N], [f64; GL_N])> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut nodes = [0.0f64; GL_N];
        let mut weights = [0.0f64; GL_N];
        let n = GL_N as f64;
        for i in 0..GL_N {
            // Chebyshev-based initial guess for the i-th root
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // evaluate P_n(x) and P_n'(x) by the three-term recurrence
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=GL_N {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl64();
    // one halving of the panel keeps the mildly singular integrands
    // (p < 1 at theta = 0, pi) at full accuracy
    let mid = 0.5 * (a + b);
    let mut total = 0.0;
    for (lo, hi) in [(a, mid), (mid, b)] {
        let c = 0.5 * (hi + lo);
        let h = 0.5 * (hi - lo);
        let mut s = 0.0;
        for i in 0..GL_N {
            s += weights[i] * f(c + h * nodes[i]);
        }
        total += h * s;
    }
    total
}

/// The fundamental-harmonic gain of `|x|^p sgn(x)` for a unit-amplitude
/// sinusoid: `c(p) = (2/pi) \int_0^pi |sin t|^(p+1) dt`.
///
/// `c(1) = 1` (linear term passes through) and `c(0) = 4/pi` (relay).
pub fn describing_gain(p: f64) -> f64 {
    assert!(
        p.is_finite() && p >= 0.0,
        "describing_gain: power must be finite and >= 0, got {p}"
    );
    2.0 / std::f64::consts::PI
        * integrate(|t| t.sin().abs().powf(p + 1.0), 0.0, std::f64::consts::PI)
}

/// The describing function of `|x|^p sgn(x)` at amplitude `a`:
/// `N(a) = c(p) a^(p-1)`.
pub fn describing_n(p: f64, a: f64) -> f64 {
    assert!(a > 0.0, "describing_n: amplitude must be positive, got {a}");
    describing_gain(p) * a.powf(p - 1.0)
}

/// Equivalent second-order linear model at one probe amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizationResult {
    pub amplitude: f64,
    pub omega_n: f64,
    pub zeta: f64,
}

/// Describing-function model of the sliding-mode differentiator. The relay
/// channel gives `omega_n = 2 sqrt(lambda1 / (pi a))`; the damping ratio is
/// amplitude-independent.
pub fn linearize_levant(p: &LevantParams, amplitude: f64) -> LinearizationResult {
    assert!(amplitude > 0.0);
    let omega_n = 2.0 * (p.lambda1 / (std::f64::consts::PI * amplitude)).sqrt();
    // n_half = c(1/2) a^(-1/2) is the equivalent gain of the sqrt channel;
    // zeta = lambda2 n_half / (2 omega_n), and the amplitude cancels
    let n_half = describing_n(0.5, amplitude);
    LinearizationResult {
        amplitude,
        omega_n,
        zeta: p.lambda2 * n_half / (2.0 * omega_n),
    }
}

/// The linear high-gain differentiator is already linear: `omega_n =
/// sqrt(a2)/tau`, `zeta = a1 / (2 sqrt(a2))`, independent of amplitude.
pub fn linearize_linear(p: &LinearParams, amplitude: f64) -> LinearizationResult {
    assert!(amplitude > 0.0);
    LinearizationResult {
        amplitude,
        omega_n: p.a2.sqrt() / p.tau,
        zeta: p.a1 / (2.0 * p.a2.sqrt()),
    }
}

/// Describing-function model of the hybrid differentiator:
///
/// ```text
/// omega_n^2 = k3 c(alpha) a^(alpha-1) + k4
/// 2 zeta omega_n = k1 c((alpha+1)/2) a^((alpha-1)/2) + k2
/// ```
///
/// Large amplitudes are governed by the linear gains (k2, k4); small
/// amplitudes by the power-law gains (k1, k3).
pub fn linearize_hybrid(p: &HybridParams, amplitude: f64) -> LinearizationResult {
    assert!(amplitude > 0.0);
    let rho1 = describing_gain(0.5 * (p.alpha + 1.0));
    let rho2 = describing_gain(p.alpha);
    let omega_n = (p.k3 * rho2 * amplitude.powf(p.alpha - 1.0) + p.k4).sqrt();
    let zeta =
        (p.k1 * rho1 * amplitude.powf(0.5 * (p.alpha - 1.0)) + p.k2) / (2.0 * omega_n);
    LinearizationResult {
        amplitude,
        omega_n,
        zeta,
    }
}
