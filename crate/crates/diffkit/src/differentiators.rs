//! Right-hand-side dynamics of the differentiator families and the
//! first-order example systems, plus the GRED output blender.

use serde::{Deserialize, Serialize};

/// `|x|^p * sgn(x)` with `sgn(0) = 0`; odd in `x`; `p = 0` gives `sgn(x)`.
pub fn pow_sgn(x: f64, p: f64) -> f64 {
    debug_assert!(p >= 0.0);
    if x == 0.0 {
        0.0
    } else if p == 0.0 {
        x.signum()
    } else {
        x.abs().powf(p) * x.signum()
    }
}

/// Estimator state: `x1` tracks the signal, `x2` its derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffState {
    pub x1: f64,
    pub x2: f64,
}

impl DiffState {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

/// Gains of the continuous hybrid differentiator
///
/// ```text
/// dx1 = x2 - k1 |e|^((alpha+1)/2) sgn(e) - k2 e
/// dx2 =    - k3 |e|^alpha         sgn(e) - k4 e,   e = x1 - v
/// ```
///
/// `k1, k3` drive the fractional-power terms, `k2, k4` the linear ones.
/// `alpha = 0` gives the discontinuous hybrid variant and `k2 = k4 = 0`
/// the purely nonlinear differentiator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridParams {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub alpha: f64,
}

impl HybridParams {
    /// Common validity: nonlinear gains strictly positive, linear gains
    /// nonnegative, `alpha` in `[0, 1)`. Family-level validation tightens
    /// this (the hybrid family requires `k2, k4 > 0`, the nonlinear family
    /// requires `k2 = k4 = 0`).
    pub fn validate(&self, path: &str) -> Result<(), String> {
        for (name, v) in [("k1", self.k1), ("k3", self.k3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{path}.{name}: must be > 0, got {v}"));
            }
        }
        for (name, v) in [("k2", self.k2), ("k4", self.k4)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{path}.{name}: must be >= 0, got {v}"));
            }
        }
        if !(self.alpha.is_finite() && (0.0..1.0).contains(&self.alpha)) {
            return Err(format!(
                "{path}.alpha: must lie in [0, 1), got {}",
                self.alpha
            ));
        }
        Ok(())
    }
}

/// Gains of the robust exact (super-twisting) differentiator
///
/// ```text
/// dx1 = x2 - lambda2 |e|^(1/2) sgn(e)
/// dx2 =    - lambda1 sgn(e)
/// ```
///
/// Exactness requires `lambda1 > L2` of the target signal; this is checked
/// at scenario load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevantParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl LevantParams {
    pub fn validate(&self, path: &str) -> Result<(), String> {
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{path}.{name}: must be > 0, got {v}"));
            }
        }
        Ok(())
    }
}

/// Gains of the linear high-gain differentiator
///
/// ```text
/// dx1 = x2 - (a1/tau)   e
/// dx2 =    - (a2/tau^2) e
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearParams {
    pub a1: f64,
    pub a2: f64,
    pub tau: f64,
}

impl LinearParams {
    pub fn validate(&self, path: &str) -> Result<(), String> {
        for (name, v) in [("a1", self.a1), ("a2", self.a2), ("tau", self.tau)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{path}.{name}: must be > 0, got {v}"));
            }
        }
        Ok(())
    }
}

/// GRED: a Levant and a linear differentiator run in parallel; the outputs
/// are blended by piecewise-linear weights of the inter-estimator errors.
///
/// `eps_p`/`eps_d` are the switching thresholds for position and derivative,
/// `c_p`/`c_d` the boundary-layer widths (`c < eps` so the ramp regions are
/// nonempty).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GredParams {
    pub levant: LevantParams,
    pub linear: LinearParams,
    pub eps_p: f64,
    pub c_p: f64,
    pub eps_d: f64,
    pub c_d: f64,
}

impl GredParams {
    pub fn validate(&self, path: &str) -> Result<(), String> {
        self.levant.validate(&format!("{path}.levant"))?;
        self.linear.validate(&format!("{path}.linear"))?;
        for (name, v) in [
            ("eps_p", self.eps_p),
            ("c_p", self.c_p),
            ("eps_d", self.eps_d),
            ("c_d", self.c_d),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{path}.{name}: must be > 0, got {v}"));
            }
        }
        if self.c_p >= self.eps_p {
            return Err(format!(
                "{path}.c_p: must be < eps_p ({} >= {})",
                self.c_p, self.eps_p
            ));
        }
        if self.c_d >= self.eps_d {
            return Err(format!(
                "{path}.c_d: must be < eps_d ({} >= {})",
                self.c_d, self.eps_d
            ));
        }
        Ok(())
    }
}

/// Hybrid continuous differentiator dynamics.
pub fn hybrid_rhs(p: &HybridParams, s: &DiffState, v_meas: f64) -> (f64, f64) {
    let e = s.x1 - v_meas;
    let dx1 = s.x2 - p.k1 * pow_sgn(e, 0.5 * (p.alpha + 1.0)) - p.k2 * e;
    let dx2 = -p.k3 * pow_sgn(e, p.alpha) - p.k4 * e;
    (dx1, dx2)
}

/// Robust exact differentiator dynamics.
pub fn levant_rhs(p: &LevantParams, s: &DiffState, v_meas: f64) -> (f64, f64) {
    let e = s.x1 - v_meas;
    let dx1 = s.x2 - p.lambda2 * pow_sgn(e, 0.5);
    let dx2 = -p.lambda1 * pow_sgn(e, 0.0);
    (dx1, dx2)
}

/// Linear high-gain differentiator dynamics.
pub fn linear_rhs(p: &LinearParams, s: &DiffState, v_meas: f64) -> (f64, f64) {
    let e = s.x1 - v_meas;
    let dx1 = s.x2 - p.a1 / p.tau * e;
    let dx2 = -p.a2 / (p.tau * p.tau) * e;
    (dx1, dx2)
}

/// Piecewise-linear blend weight: 0 below `eps - c`, ramps to 1 at `eps`.
///
/// Continuous in `e` and monotone nondecreasing in `|e|`.
pub fn gred_weight(e: f64, eps: f64, c: f64) -> f64 {
    debug_assert!(0.0 < c && c < eps);
    let a = e.abs();
    if a < eps - c {
        0.0
    } else if a < eps {
        (a - eps + c) / c
    } else {
        1.0
    }
}

/// Blended GRED outputs `(y1, y2)`.
///
/// Weight 0 selects the Levant output, weight 1 the linear one; each output
/// is a convex combination of its two inputs.
pub fn gred_output(
    levant_state: &DiffState,
    linear_state: &DiffState,
    p: &GredParams,
) -> (f64, f64) {
    let e_p = levant_state.x1 - linear_state.x1;
    let e_d = levant_state.x2 - linear_state.x2;
    let w1 = gred_weight(e_p, p.eps_p, p.c_p);
    let w2 = gred_weight(e_d, p.eps_d, p.c_d);
    let y1 = w1 * linear_state.x1 + (1.0 - w1) * levant_state.x1;
    let y2 = w2 * linear_state.x2 + (1.0 - w2) * levant_state.x2;
    (y1, y2)
}

/// The three first-order example systems used to contrast chattering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FirstOrderKind {
    /// `dx = -2 sgn(x)` (sliding mode; chatters around the origin)
    SlidingMode,
    /// `dx = -2 x`
    Linear,
    /// `dx = -2 |x|^(1/2) sgn(x)` (finite-time, no chattering)
    Power,
}

/// Feedback `u` of the selected first-order system; the dynamics are
/// `dx = u`.
pub fn first_order_rhs(kind: FirstOrderKind, x: f64) -> f64 {
    match kind {
        FirstOrderKind::SlidingMode => -2.0 * pow_sgn(x, 0.0),
        FirstOrderKind::Linear => -2.0 * x,
        FirstOrderKind::Power => -2.0 * pow_sgn(x, 0.5),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn pow_sgn_basics() {
        assert_eq!(pow_sgn(0.0, 0.6), 0.0);
        assert_eq!(pow_sgn(0.0, 0.0), 0.0);
        assert_abs_diff_eq!(pow_sgn(-4.0, 0.5), -2.0);
        assert_eq!(pow_sgn(-0.3, 0.0), -1.0);
        assert_eq!(pow_sgn(7.0, 0.0), 1.0);
    }

    #[test]
    fn hybrid_rhs_zero_error() {
        let p = HybridParams {
            k1: 1.0,
            k2: 1.0,
            k3: 8.0,
            k4: 8.0,
            alpha: 0.2,
        };
        let s = DiffState::new(0.5, 3.25);
        assert_eq!(hybrid_rhs(&p, &s, 0.5), (3.25, 0.0));
    }

    #[test]
    fn hybrid_rhs_unit_error() {
        // at e = 1 every power term equals 1
        let p = HybridParams {
            k1: 1.0,
            k2: 1.0,
            k3: 8.0,
            k4: 8.0,
            alpha: 0.2,
        };
        let (dx1, dx2) = hybrid_rhs(&p, &DiffState::new(1.0, 0.0), 0.0);
        assert_abs_diff_eq!(dx1, -2.0);
        assert_abs_diff_eq!(dx2, -16.0);
    }

    #[test]
    fn levant_rhs_hand_values() {
        let p = LevantParams {
            lambda1: 28.0,
            lambda2: 6.0,
        };
        assert_eq!(levant_rhs(&p, &DiffState::new(0.0, 4.0), 0.0), (4.0, 0.0));
        assert_eq!(
            levant_rhs(&p, &DiffState::new(1.0, 0.0), 0.0),
            (-6.0, -28.0)
        );
        assert_eq!(levant_rhs(&p, &DiffState::new(-1.0, 0.0), 0.0), (6.0, 28.0));
    }

    #[test]
    fn linear_rhs_hand_values_and_tau_scaling() {
        let p = LinearParams {
            a1: 2.0,
            a2: 1.0,
            tau: 0.1,
        };
        let s = DiffState::new(1.0, 0.0);
        let (dx1, dx2) = linear_rhs(&p, &s, 0.0);
        assert_abs_diff_eq!(dx1, -20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dx2, -100.0, epsilon = 1e-12);
        let half = LinearParams { tau: 0.05, ..p };
        let (h1, h2) = linear_rhs(&half, &s, 0.0);
        assert_abs_diff_eq!(h1 / dx1, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h2 / dx2, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn gred_weight_branches() {
        assert_eq!(gred_weight(0.5, 1.0, 0.05), 0.0);
        assert_abs_diff_eq!(gred_weight(0.97, 1.0, 0.05), 0.4, epsilon = 1e-12);
        assert_eq!(gred_weight(2.0, 1.0, 0.05), 1.0);
        assert_eq!(gred_weight(-2.0, 1.0, 0.05), 1.0);
    }

    fn gred_params() -> GredParams {
        GredParams {
            levant: LevantParams {
                lambda1: 28.0,
                lambda2: 6.0,
            },
            linear: LinearParams {
                a1: 0.14,
                a2: 0.2,
                tau: 0.1,
            },
            eps_p: 1.0,
            c_p: 0.05,
            eps_d: 0.5,
            c_d: 0.05,
        }
    }

    #[test]
    fn gred_output_selects_and_blends() {
        let p = gred_params();
        let s = DiffState::new(0.3, -1.1);
        assert_eq!(gred_output(&s, &s, &p), (0.3, -1.1));
        // small inter-estimator error: Levant wins
        let lev = DiffState::new(0.0, 0.0);
        let lin = DiffState::new(0.1, 0.1);
        assert_eq!(gred_output(&lev, &lin, &p), (0.0, 0.0));
        // large error: linear wins
        let lin_far = DiffState::new(3.0, 2.0);
        assert_eq!(gred_output(&lev, &lin_far, &p), (3.0, 2.0));
    }

    #[test]
    fn first_order_hand_values() {
        assert_eq!(first_order_rhs(FirstOrderKind::SlidingMode, 0.001), -2.0);
        assert_eq!(first_order_rhs(FirstOrderKind::SlidingMode, -0.001), 2.0);
        assert_eq!(first_order_rhs(FirstOrderKind::Linear, 1.0), -2.0);
        assert_abs_diff_eq!(first_order_rhs(FirstOrderKind::Power, 0.25), -1.0);
    }

    #[test]
    fn gred_params_validation() {
        let mut p = gred_params();
        assert!(p.validate("p").is_ok());
        p.c_p = 2.0;
        assert!(p.validate("p").unwrap_err().contains("c_p"));
    }

    proptest! {
        #[test]
        fn pow_sgn_is_odd(x in -1e3f64..1e3, p in 0.0f64..3.0) {
            prop_assert_eq!(pow_sgn(-x, p), -pow_sgn(x, p));
        }

        #[test]
        fn rhs_families_are_odd(
            x1 in -10.0f64..10.0,
            x2 in -10.0f64..10.0,
            v in -10.0f64..10.0,
        ) {
            let h = HybridParams { k1: 1.0, k2: 7.0, k3: 8.0, k4: 25.0, alpha: 0.2 };
            let lv = LevantParams { lambda1: 28.0, lambda2: 6.0 };
            let ln = LinearParams { a1: 2.0, a2: 1.0, tau: 0.1 };
            let s = DiffState::new(x1, x2);
            let m = DiffState::new(-x1, -x2);
            let tol = 1e-9;
            for (a, b) in [
                (hybrid_rhs(&h, &s, v), hybrid_rhs(&h, &m, -v)),
                (levant_rhs(&lv, &s, v), levant_rhs(&lv, &m, -v)),
                (linear_rhs(&ln, &s, v), linear_rhs(&ln, &m, -v)),
            ] {
                prop_assert!((a.0 + b.0).abs() <= tol * (1.0 + a.0.abs()));
                prop_assert!((a.1 + b.1).abs() <= tol * (1.0 + a.1.abs()));
            }
        }

        #[test]
        fn hybrid_alpha_zero_matches_discontinuous_form(
            x1 in -5.0f64..5.0,
            x2 in -5.0f64..5.0,
            v in -5.0f64..5.0,
        ) {
            let p = HybridParams { k1: 1.5, k2: 2.0, k3: 3.0, k4: 4.0, alpha: 0.0 };
            let s = DiffState::new(x1, x2);
            let e = x1 - v;
            let (dx1, dx2) = hybrid_rhs(&p, &s, v);
            let want1 = x2 - p.k1 * pow_sgn(e, 0.5) - p.k2 * e;
            let want2 = -p.k3 * pow_sgn(e, 0.0) - p.k4 * e;
            prop_assert_eq!(dx1, want1);
            prop_assert_eq!(dx2, want2);
        }

        #[test]
        fn hybrid_without_linear_terms_matches_nonlinear_form(
            x1 in -5.0f64..5.0,
            x2 in -5.0f64..5.0,
            v in -5.0f64..5.0,
        ) {
            let p = HybridParams { k1: 6.0, k2: 0.0, k3: 9.0, k4: 0.0, alpha: 0.2 };
            let s = DiffState::new(x1, x2);
            let e = x1 - v;
            let (dx1, dx2) = hybrid_rhs(&p, &s, v);
            prop_assert_eq!(dx1, x2 - 6.0 * pow_sgn(e, 0.6));
            prop_assert_eq!(dx2, -9.0 * pow_sgn(e, 0.2));
        }

        #[test]
        fn gred_weight_is_lipschitz(
            e in -3.0f64..3.0,
            e2 in -3.0f64..3.0,
        ) {
            let (eps, c) = (1.0, 0.05);
            let d = (gred_weight(e, eps, c) - gred_weight(e2, eps, c)).abs();
            prop_assert!(d <= (e - e2).abs() / c + 1e-12);
        }

        #[test]
        fn gred_output_is_convex_combination(
            a1 in -5.0f64..5.0, a2 in -5.0f64..5.0,
            b1 in -5.0f64..5.0, b2 in -5.0f64..5.0,
        ) {
            let p = gred_params();
            let lev = DiffState::new(a1, a2);
            let lin = DiffState::new(b1, b2);
            let (y1, y2) = gred_output(&lev, &lin, &p);
            prop_assert!(y1 >= a1.min(b1) - 1e-12 && y1 <= a1.max(b1) + 1e-12);
            prop_assert!(y2 >= a2.min(b2) - 1e-12 && y2 <= a2.max(b2) + 1e-12);
        }
    }
}
