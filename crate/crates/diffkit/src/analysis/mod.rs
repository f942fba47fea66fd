//! Lyapunov certificate matrices and bounds, linear-differentiator decay
//! and frequency formulas, and describing-function linearizations.

mod certificates;
mod describing;
mod eig;
mod lindecay;

pub use certificates::{
    build_hybrid_matrices, build_second_order_certificate, lyapunov_v, noise_bound_theorem2,
    steady_bound_theorem1, zeta, zeta_norm, CertificateError, CertificateMatrices,
    SecondOrderCertificate, Theorem1Report, Theorem2Report,
};
pub use describing::{
    describing_gain, describing_n, linearize_hybrid, linearize_levant, linearize_linear,
    LinearizationResult,
};
pub use eig::{
    lambda_max_sym2, lambda_max_sym3, lambda_min_sym2, lambda_min_sym3, sym2_eigenvalues,
    sym3_eigenvalues, EigError,
};
pub use lindecay::{eq46_bound, expm2, linear_decay, spectral_norm2, LinearDecay};

use crate::differentiators::LinearParams;

/// Frequency-response magnitudes of the linear high-gain differentiator at
/// one probe frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqResponse {
    /// |X21/V|(j omega): signal-tracking magnitude
    pub mag_track: f64,
    /// |X22/V|(j omega): derivative-estimation magnitude
    pub mag_deriv: f64,
    pub db_track: f64,
    pub db_deriv: f64,
}

/// Evaluate the tracking and derivative transfer functions
///
/// ```text
/// X21/V = ((a1/tau) s + a2/tau^2) / (s^2 + (a1/tau) s + a2/tau^2)
/// X22/V = ((a2/tau^2) s)          / (s^2 + (a1/tau) s + a2/tau^2)
/// ```
///
/// at `s = j omega`.
pub fn linear_freq_response(p: &LinearParams, omega: f64) -> FreqResponse {
    let b1 = p.a1 / p.tau;
    let b0 = p.a2 / (p.tau * p.tau);
    // denominator (b0 - w^2) + j b1 w
    let den = ((b0 - omega * omega).powi(2) + (b1 * omega).powi(2)).sqrt();
    let mag_track = ((b1 * omega).powi(2) + b0 * b0).sqrt() / den;
    let mag_deriv = b0 * omega / den;
    FreqResponse {
        mag_track,
        mag_deriv,
        db_track: 20.0 * mag_track.log10(),
        db_deriv: 20.0 * mag_deriv.log10(),
    }
}
