//! Lyapunov certificates for the hybrid differentiator: the quadratic-form
//! matrices of the stability proof, the steady-state accuracy bound, and the
//! bounded-noise robustness bound.

use thiserror::Error;

use super::eig::{lambda_max_sym3, lambda_min_sym2, lambda_min_sym3};
use crate::differentiators::{pow_sgn, HybridParams};

#[derive(Debug, Error, PartialEq)]
pub enum CertificateError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("lambda_min({matrix}) = {value} is not positive; the certificate hypothesis fails")]
    NonPositiveLambdaMin { matrix: &'static str, value: f64 },
}

/// The generalized state `zeta = [|e1|^((a+1)/2) sgn(e1), e1, e2]` in which
/// the Lyapunov function is a quadratic form.
pub fn zeta(p: &HybridParams, e1: f64, e2: f64) -> [f64; 3] {
    [pow_sgn(e1, 0.5 * (p.alpha + 1.0)), e1, e2]
}

/// `||zeta||_2 = sqrt(|e1|^(a+1) + e1^2 + e2^2)`.
pub fn zeta_norm(p: &HybridParams, e1: f64, e2: f64) -> f64 {
    (e1.abs().powf(p.alpha + 1.0) + e1 * e1 + e2 * e2).sqrt()
}

/// The Lyapunov function of the hybrid error system, evaluated directly from
/// its defining sum-of-squares form.
pub fn lyapunov_v(p: &HybridParams, e1: f64, e2: f64) -> f64 {
    let cross = p.k1 * pow_sgn(e1, 0.5 * (p.alpha + 1.0)) + p.k2 * e1 - e2;
    2.0 * p.k3 / (p.alpha + 1.0) * e1.abs().powf(p.alpha + 1.0)
        + p.k4 * e1 * e1
        + 0.5 * e2 * e2
        + 0.5 * cross * cross
}

/// The certificate matrices of the hybrid differentiator, with their
/// eigenvalue extremes precomputed.
///
/// `pi` bounds the Lyapunov function between `lambda_min_pi ||zeta||^2` and
/// `lambda_max_pi ||zeta||^2`; `omega1`/`omega2` drive the decay of its time
/// derivative; `gamma1` collects the disturbance channel. `v_gram` is the
/// exact Gram matrix of the Lyapunov function: `V = zeta^T v_gram zeta`
/// identically (it differs from `pi` only in the (1,1) entry).
#[derive(Debug, Clone)]
pub struct CertificateMatrices {
    pub params: HybridParams,
    pub pi: [[f64; 3]; 3],
    pub omega1: [[f64; 3]; 3],
    pub omega2: [[f64; 3]; 3],
    pub v_gram: [[f64; 3]; 3],
    pub gamma1: [f64; 3],
    pub gamma2: [f64; 3],
    pub lambda_min_pi: f64,
    pub lambda_max_pi: f64,
    pub lambda_min_omega1: f64,
    pub lambda_min_omega2: f64,
    pub lambda_min_pi_gram: f64,
    pub lambda_max_pi_gram: f64,
    pub gamma1_norm: f64,
    pub gamma2_norm: f64,
}

impl CertificateMatrices {
    /// Noise-to-error gain of the fractional-power decay branch.
    pub fn psi1(&self, epsilon: f64) -> f64 {
        let p = &self.params;
        let inner = p.k1 * 2f64.powf(0.5 * (1.0 - p.alpha)) * epsilon.powf(0.5 * (p.alpha + 1.0))
            + p.k2 * epsilon;
        (2.0 * p.k3 + 0.5 * p.k1 * (p.alpha + 1.0) * self.gamma2_norm) * inner
    }

    /// Noise-to-error gain of the linear decay branch.
    pub fn psi2(&self, epsilon: f64) -> f64 {
        let p = &self.params;
        let inner = p.k1 * 2f64.powf(0.5 * (1.0 - p.alpha)) * epsilon.powf(0.5 * (p.alpha + 1.0))
            + p.k2 * epsilon;
        (2.0 * p.k4 + p.k2 * self.gamma2_norm) * inner
            + (1.0 + self.gamma2_norm)
                * (p.k3 * 2f64.powf(1.0 - p.alpha) * epsilon.powf(p.alpha) + p.k4 * epsilon)
    }
}

/// Build all certificate matrices for one hybrid gain set.
pub fn build_hybrid_matrices(p: &HybridParams) -> Result<CertificateMatrices, CertificateError> {
    p.validate("hybrid").map_err(CertificateError::InvalidParams)?;
    let (k1, k2, k3, k4, a) = (p.k1, p.k2, p.k3, p.k4, p.alpha);

    let pi = [
        [4.0 * k3 / (a + 1.0), k1 * k2, -k1],
        [k1 * k2, 2.0 * k4 + k2 * k2, -k2],
        [-k1, -k2, 2.0],
    ];
    let omega1 = {
        let h = 0.5 * k1;
        [
            [
                h * (2.0 * k3 + k1 * k1 * (a + 1.0)),
                0.0,
                h * (-k1 * (a + 1.0)),
            ],
            [
                0.0,
                h * (2.0 * k4 + k2 * k2 * (a + 5.0)),
                h * (-k2 * (a + 3.0)),
            ],
            [
                h * (-k1 * (a + 1.0)),
                h * (-k2 * (a + 3.0)),
                h * (a + 1.0),
            ],
        ]
    };
    let omega2 = [
        [k2 * (k3 + k2 * k2 * (a + 2.0)), 0.0, 0.0],
        [0.0, k2 * (k4 + k2 * k2), -k2 * k2],
        [0.0, -k2 * k2, k2],
    ];
    // exact Gram matrix of V: half of pi plus the k1^2 square term that the
    // factor-of-two bound absorbs
    let mut v_gram = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            v_gram[i][j] = 0.5 * pi[i][j];
        }
    }
    v_gram[0][0] += 0.5 * k1 * k1;

    let gamma1 = [k1, k2, -2.0];
    let gamma2 = [k1, k2, -1.0];
    let norm3 = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();

    // the matrices are symmetric by construction, so the eigensolver cannot
    // reject them
    Ok(CertificateMatrices {
        params: *p,
        lambda_min_pi: lambda_min_sym3(&pi).expect("pi is symmetric"),
        lambda_max_pi: lambda_max_sym3(&pi).expect("pi is symmetric"),
        lambda_min_omega1: lambda_min_sym3(&omega1).expect("omega1 is symmetric"),
        lambda_min_omega2: lambda_min_sym3(&omega2).expect("omega2 is symmetric"),
        lambda_min_pi_gram: lambda_min_sym3(&v_gram).expect("v_gram is symmetric"),
        lambda_max_pi_gram: lambda_max_sym3(&v_gram).expect("v_gram is symmetric"),
        gamma1_norm: norm3(&gamma1),
        gamma2_norm: norm3(&gamma2),
        pi,
        omega1,
        omega2,
        v_gram,
        gamma1,
        gamma2,
    })
}

/// Finite-time steady-state accuracy bound on `||zeta||` for a clean input
/// with `|d^2 v0/dt^2| <= l2`.
#[derive(Debug, Clone)]
pub struct Theorem1Report {
    pub lambda_min_omega1: f64,
    pub lambda_min_omega2: f64,
    pub gamma1_norm: f64,
    /// `l2 ||Gamma1|| / lambda_min(Omega1)`; the gains are well chosen when
    /// this is below one.
    pub ratio: f64,
    /// `ratio^((alpha+1)/(2 alpha))`, the steady-state bound on `||zeta||`.
    pub bound: f64,
    /// Whether the contraction ratio is below one, so the bound shrinks as
    /// the exponent grows.
    pub hypothesis_holds: bool,
}

pub fn steady_bound_theorem1(
    p: &HybridParams,
    l2: f64,
) -> Result<Theorem1Report, CertificateError> {
    if !(l2.is_finite() && l2 >= 0.0) {
        return Err(CertificateError::InvalidParams(format!(
            "l2 must be finite and >= 0, got {l2}"
        )));
    }
    if p.alpha <= 0.0 {
        return Err(CertificateError::InvalidParams(
            "alpha must be positive for the steady-state bound".into(),
        ));
    }
    let m = build_hybrid_matrices(p)?;
    if m.lambda_min_omega1 <= 0.0 {
        return Err(CertificateError::NonPositiveLambdaMin {
            matrix: "Omega1",
            value: m.lambda_min_omega1,
        });
    }
    let ratio = l2 * m.gamma1_norm / m.lambda_min_omega1;
    let bound = ratio.powf((p.alpha + 1.0) / (2.0 * p.alpha));
    Ok(Theorem1Report {
        lambda_min_omega1: m.lambda_min_omega1,
        lambda_min_omega2: m.lambda_min_omega2,
        gamma1_norm: m.gamma1_norm,
        ratio,
        bound,
        hypothesis_holds: ratio < 1.0,
    })
}

/// Finite-time bound on `||zeta||` under bounded measurement noise
/// `|delta| <= epsilon`.
#[derive(Debug, Clone)]
pub struct Theorem2Report {
    pub psi1: f64,
    pub psi2: f64,
    pub lambda_min_omega1: f64,
    pub lambda_min_omega2: f64,
    pub gamma1_norm: f64,
    /// `max(psi1 / (lambda_min(Omega1) - l2 ||Gamma1||), psi2 / lambda_min(Omega2))`,
    /// present only when both denominators are positive.
    pub bound: Option<f64>,
    /// Human-readable reasons the bound is unavailable, empty on success.
    pub failed_hypotheses: Vec<String>,
}

pub fn noise_bound_theorem2(
    p: &HybridParams,
    l2: f64,
    epsilon: f64,
) -> Result<Theorem2Report, CertificateError> {
    if !(l2.is_finite() && l2 >= 0.0) {
        return Err(CertificateError::InvalidParams(format!(
            "l2 must be finite and >= 0, got {l2}"
        )));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(CertificateError::InvalidParams(format!(
            "epsilon must be finite and >= 0, got {epsilon}"
        )));
    }
    let m = build_hybrid_matrices(p)?;
    let den1 = m.lambda_min_omega1 - l2 * m.gamma1_norm;
    let den2 = m.lambda_min_omega2;
    let mut failed = Vec::new();
    if den1 <= 0.0 {
        failed.push(format!(
            "lambda_min(Omega1) = {:.6} does not exceed l2*||Gamma1|| = {:.6}",
            m.lambda_min_omega1,
            l2 * m.gamma1_norm
        ));
    }
    if den2 <= 0.0 {
        failed.push(format!(
            "lambda_min(Omega2) = {:.6} is not positive (requires k2 > 0)",
            den2
        ));
    }
    let psi1 = m.psi1(epsilon);
    let psi2 = m.psi2(epsilon);
    let bound = if failed.is_empty() {
        Some((psi1 / den1).max(psi2 / den2))
    } else {
        None
    };
    Ok(Theorem2Report {
        psi1,
        psi2,
        lambda_min_omega1: m.lambda_min_omega1,
        lambda_min_omega2: m.lambda_min_omega2,
        gamma1_norm: m.gamma1_norm,
        bound,
        failed_hypotheses: failed,
    })
}

/// Certificate for the second-order (first-derivative) differentiator:
/// `V = z^T P z` decays with rate matrix `Q` and homogeneity exponent
/// `theta = (3 alpha + 1) / (2 (alpha + 1))`.
#[derive(Debug, Clone)]
pub struct SecondOrderCertificate {
    pub p_mat: [[f64; 2]; 2],
    pub q_mat: [[f64; 2]; 2],
    pub theta: f64,
    pub lambda_min_p: f64,
    pub lambda_min_q: f64,
}

pub fn build_second_order_certificate(
    k1: f64,
    k2: f64,
    alpha: f64,
) -> Result<SecondOrderCertificate, CertificateError> {
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(CertificateError::InvalidParams(format!(
            "k1 and k2 must be positive, got k1={k1}, k2={k2}"
        )));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(CertificateError::InvalidParams(format!(
            "alpha must be in [0, 1), got {alpha}"
        )));
    }
    let p_mat = [
        [0.5 * (4.0 * k2 / (alpha + 1.0) + k1 * k1), -0.5 * k1],
        [-0.5 * k1, 1.0],
    ];
    let q_mat = [
        [
            0.5 * k1 * (2.0 * k2 + k1 * k1 * (alpha + 1.0)),
            -0.5 * k1 * k1 * (alpha + 1.0),
        ],
        [-0.5 * k1 * k1 * (alpha + 1.0), 0.5 * k1 * (alpha + 1.0)],
    ];
    Ok(SecondOrderCertificate {
        lambda_min_p: lambda_min_sym2(&p_mat).expect("P is symmetric"),
        lambda_min_q: lambda_min_sym2(&q_mat).expect("Q is symmetric"),
        p_mat,
        q_mat,
        theta: (3.0 * alpha + 1.0) / (2.0 * (alpha + 1.0)),
    })
}
