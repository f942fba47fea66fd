//! Exponential decay certificate and steady-state error bound for the linear
//! high-gain differentiator.

use crate::differentiators::LinearParams;

/// Matrix exponential of a 2x2 matrix by scaling and squaring with a
/// high-order Taylor kernel.
pub fn expm2(m: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let norm = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(s as i32);
    let a = [
        [m[0][0] * scale, m[0][1] * scale],
        [m[1][0] * scale, m[1][1] * scale],
    ];
    // Taylor series of exp(a); 18 terms is far past double precision for
    // ||a|| <= 0.5
    let mut result = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = [[1.0, 0.0], [0.0, 1.0]];
    for k in 1..=18 {
        let mut next = [[0.0f64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = (term[i][0] * a[0][j] + term[i][1] * a[1][j]) / k as f64;
            }
        }
        term = next;
        for i in 0..2 {
            for j in 0..2 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        let mut sq = [[0.0f64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                sq[i][j] = result[i][0] * result[0][j] + result[i][1] * result[1][j];
            }
        }
        result = sq;
    }
    result
}

/// Spectral (operator 2-) norm of a 2x2 matrix: the square root of the
/// largest eigenvalue of `M^T M`.
pub fn spectral_norm2(m: &[[f64; 2]; 2]) -> f64 {
    let g = [
        [
            m[0][0] * m[0][0] + m[1][0] * m[1][0],
            m[0][0] * m[0][1] + m[1][0] * m[1][1],
        ],
        [
            m[0][0] * m[0][1] + m[1][0] * m[1][1],
            m[0][1] * m[0][1] + m[1][1] * m[1][1],
        ],
    ];
    super::eig::lambda_max_sym2(&g)
        .expect("Gram matrix is symmetric")
        .max(0.0)
        .sqrt()
}

/// Decay certificate for the fast error dynamics of the linear
/// differentiator: `||e^{A t/tau}|| <= sigma1 e^{-lambda t / tau}` with
/// `A = [[-a1, 1], [-a2, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDecay {
    /// Decay rate in the fast time scale: `-max Re eig(A)`.
    pub lambda: f64,
    /// Transient overshoot constant, measured on a grid of the fast time
    /// scale; always >= 1.
    pub sigma1: f64,
}

/// Measure the decay certificate of the gain matrix `A = [[-a1, 1], [-a2, 0]]`
/// for the given parameters. `sigma1` is the supremum of
/// `||e^{A s}|| e^{lambda s}` over a 2000-point grid of `s in [0, 20 tau]`
/// in the fast variable, with `lambda` backed off by 1e-6 so the supremum is
/// finite even for defective `A`.
pub fn linear_decay(p: &LinearParams) -> LinearDecay {
    // roots of s^2 + a1 s + a2
    let half = 0.5 * p.a1;
    let disc = half * half - p.a2;
    let max_re = if disc >= 0.0 {
        -half + disc.sqrt()
    } else {
        -half
    };
    let lambda = (-max_re - 1e-6).max(0.0);
    let a = [[-p.a1, 1.0], [-p.a2, 0.0]];
    let n = 2000;
    let t_max = 20.0 * p.tau;
    let mut sigma1 = 1.0f64;
    for k in 0..=n {
        let s = t_max * k as f64 / n as f64;
        let e = expm2(&[
            [a[0][0] * s, a[0][1] * s],
            [a[1][0] * s, a[1][1] * s],
        ]);
        sigma1 = sigma1.max(spectral_norm2(&e) * (lambda * s).exp());
    }
    LinearDecay { lambda, sigma1 }
}

/// Steady-state error bound of the linear differentiator:
/// `sigma1 l2 tau / lambda`, linear in `tau`.
pub fn eq46_bound(tau: f64, sigma1: f64, lambda: f64, l2: f64) -> f64 {
    assert!(tau > 0.0 && sigma1 >= 1.0 && lambda > 0.0 && l2 >= 0.0);
    sigma1 * l2 * tau / lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix2;

    #[test]
    fn expm_of_zero_is_identity() {
        let e = expm2(&[[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(e, [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn expm_of_diagonal() {
        let e = expm2(&[[1.0, 0.0], [0.0, -2.0]]);
        assert_abs_diff_eq!(e[0][0], 1f64.exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[1][1], (-2f64).exp(), epsilon = 1e-12);
        assert_eq!(e[0][1], 0.0);
        assert_eq!(e[1][0], 0.0);
    }

    #[test]
    fn expm_rotation_block() {
        // exp([[0, -t], [t, 0]]) = rotation by t
        let t = 1.3f64;
        let e = expm2(&[[0.0, -t], [t, 0.0]]);
        assert_abs_diff_eq!(e[0][0], t.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[0][1], -t.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[1][0], t.sin(), epsilon = 1e-12);
    }

    #[test]
    fn expm_matches_nalgebra_oracle() {
        for m in [
            [[-2.0, 1.0], [-1.0, 0.0]],
            [[-6.0, 1.0], [-9.0, 0.0]],
            [[0.3, -4.0], [2.0, 1.5]],
        ] {
            let ours = expm2(&m);
            let na = Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]).exp();
            for i in 0..2 {
                for j in 0..2 {
                    assert_abs_diff_eq!(ours[i][j], na[(i, j)], epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn spectral_norm_examples() {
        assert_abs_diff_eq!(spectral_norm2(&[[1.0, 0.0], [0.0, 1.0]]), 1.0);
        assert_abs_diff_eq!(spectral_norm2(&[[3.0, 0.0], [0.0, -5.0]]), 5.0);
        // rank-one [[1,1],[1,1]] has norm 2
        assert_abs_diff_eq!(spectral_norm2(&[[1.0, 1.0], [1.0, 1.0]]), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn critically_damped_gains_have_unit_rate() {
        // a1 = 2, a2 = 1: double root at -1
        let d = linear_decay(&LinearParams {
            a1: 2.0,
            a2: 1.0,
            tau: 1.0,
        });
        assert_abs_diff_eq!(d.lambda, 1.0, epsilon = 1e-5);
        assert!(d.sigma1 >= 1.0);
    }

    #[test]
    fn certificate_dominates_the_transient() {
        let p = LinearParams {
            a1: 6.0,
            a2: 9.0,
            tau: 0.5,
        };
        let d = linear_decay(&p);
        let a = [[-p.a1, 1.0], [-p.a2, 0.0]];
        for k in 0..=200 {
            let s = 20.0 * p.tau * k as f64 / 200.0;
            let e = expm2(&[
                [a[0][0] * s, a[0][1] * s],
                [a[1][0] * s, a[1][1] * s],
            ]);
            assert!(spectral_norm2(&e) <= d.sigma1 * (-d.lambda * s).exp() + 1e-9);
        }
    }

    #[test]
    fn bound_is_exactly_linear_in_tau() {
        let b1 = eq46_bound(0.1, 3.0, 1.0, 2.0);
        let b2 = eq46_bound(0.05, 3.0, 1.0, 2.0);
        assert_abs_diff_eq!(b2 / b1, 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(b1, 0.6, epsilon = 1e-15);
    }
}
