//! Clean reference signals with analytic derivatives, and bounded
//! measurement noise.

use serde::{Deserialize, Serialize};

/// The clean input signal `v0(t)` together with its first two analytic
/// derivatives and an exact second-derivative bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalSpec {
    /// `v0(t) = offset + amplitude * sin(omega * t + phase)`
    Sinusoid {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `v0(t) = offset`
    Constant {
        #[serde(default)]
        offset: f64,
    },
    /// `v0(t) = c0 + c1*t + c2*t^2`
    Polynomial {
        #[serde(default)]
        c0: f64,
        #[serde(default)]
        c1: f64,
        #[serde(default)]
        c2: f64,
    },
}

impl SignalSpec {
    /// `v0(t)` and its exact first and second derivatives.
    pub fn sample_clean(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            SignalSpec::Sinusoid {
                amplitude,
                omega,
                phase,
                offset,
            } => {
                let arg = omega * t + phase;
                (
                    offset + amplitude * arg.sin(),
                    amplitude * omega * arg.cos(),
                    -amplitude * omega * omega * arg.sin(),
                )
            }
            SignalSpec::Constant { offset } => (offset, 0.0, 0.0),
            SignalSpec::Polynomial { c0, c1, c2 } => {
                (c0 + c1 * t + c2 * t * t, c1 + 2.0 * c2 * t, 2.0 * c2)
            }
        }
    }

    /// Exact `sup_t |d^2 v0 / dt^2|`.
    pub fn second_derivative_bound(&self) -> f64 {
        match *self {
            SignalSpec::Sinusoid {
                amplitude, omega, ..
            } => amplitude.abs() * omega * omega,
            SignalSpec::Constant { .. } => 0.0,
            SignalSpec::Polynomial { c2, .. } => 2.0 * c2.abs(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            SignalSpec::Sinusoid {
                amplitude,
                omega,
                phase,
                offset,
            } => {
                for (name, v) in [
                    ("signal.amplitude", amplitude),
                    ("signal.omega", omega),
                    ("signal.phase", phase),
                    ("signal.offset", offset),
                ] {
                    if !v.is_finite() {
                        return Err(format!("{name}: must be finite, got {v}"));
                    }
                }
                Ok(())
            }
            SignalSpec::Constant { offset } => {
                if offset.is_finite() {
                    Ok(())
                } else {
                    Err(format!("signal.offset: must be finite, got {offset}"))
                }
            }
            SignalSpec::Polynomial { c0, c1, c2 } => {
                for (name, v) in [("signal.c0", c0), ("signal.c1", c1), ("signal.c2", c2)] {
                    if !v.is_finite() {
                        return Err(format!("{name}: must be finite, got {v}"));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Bounded measurement noise `delta(t)` with `|delta(t)| <= epsilon`.
///
/// The seeded-uniform kind is a pure function of `(seed, t)`: the same seed
/// and the same sample times reproduce the noise path bit-exactly. The
/// integrator samples it once per step and holds it through the step, so the
/// path is defined by the dt grid (changing dt changes the path).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseSpec {
    None,
    SeededUniform { epsilon: f64, seed: u64 },
    Sinusoidal { epsilon: f64, noise_omega: f64 },
}

impl NoiseSpec {
    /// `delta(t)`, deterministic in `(self, t)`.
    pub fn sample(&self, t: f64) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::SeededUniform { epsilon, seed } => {
                let u = uniform_01(seed, t.to_bits());
                epsilon * (2.0 * u - 1.0)
            }
            NoiseSpec::Sinusoidal {
                epsilon,
                noise_omega,
            } => epsilon * (noise_omega * t).sin(),
        }
    }

    /// The amplitude bound `epsilon`.
    pub fn epsilon(&self) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::SeededUniform { epsilon, .. } => epsilon,
            NoiseSpec::Sinusoidal { epsilon, .. } => epsilon,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let eps = self.epsilon();
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(format!("noise.epsilon: must be finite and >= 0, got {eps}"));
        }
        if let NoiseSpec::Sinusoidal { noise_omega, .. } = *self {
            if !noise_omega.is_finite() {
                return Err(format!(
                    "noise.noise_omega: must be finite, got {noise_omega}"
                ));
            }
        }
        Ok(())
    }
}

/// One draw in [0, 1) from a stateless splitmix64 hash of `(seed, key)`.
fn uniform_01(seed: u64, key: u64) -> f64 {
    let mut z = seed ^ key.rotate_left(17);
    // two splitmix64 rounds
    for _ in 0..2 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn sec6_signal() -> SignalSpec {
        SignalSpec::Sinusoid {
            amplitude: 2.0,
            omega: 1.0,
            phase: 0.0,
            offset: 0.0,
        }
    }

    #[test]
    fn sinusoid_at_zero_and_quarter_period() {
        let s = sec6_signal();
        let (v, dv, ddv) = s.sample_clean(0.0);
        assert_abs_diff_eq!(v, 0.0);
        assert_abs_diff_eq!(dv, 2.0);
        assert_abs_diff_eq!(ddv, 0.0);
        let (v, dv, ddv) = s.sample_clean(std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dv, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ddv, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn constant_signal() {
        let s = SignalSpec::Constant { offset: 3.0 };
        for t in [-4.2, 0.0, 17.0] {
            assert_eq!(s.sample_clean(t), (3.0, 0.0, 0.0));
        }
        assert_eq!(s.second_derivative_bound(), 0.0);
    }

    #[test]
    fn second_derivative_bounds() {
        assert_abs_diff_eq!(sec6_signal().second_derivative_bound(), 2.0);
        let s = SignalSpec::Sinusoid {
            amplitude: 2.0,
            omega: 3.0,
            phase: 0.0,
            offset: 0.0,
        };
        assert_abs_diff_eq!(s.second_derivative_bound(), 18.0);
        let p = SignalSpec::Polynomial {
            c0: 0.0,
            c1: 0.0,
            c2: 1.0,
        };
        assert_abs_diff_eq!(p.second_derivative_bound(), 2.0);
    }

    #[test]
    fn first_derivative_matches_finite_difference() {
        let s = sec6_signal();
        let h = 1e-5;
        for k in 0..200 {
            let t = 0.05 * k as f64;
            let (_, dv, _) = s.sample_clean(t);
            let fd = (s.sample_clean(t + h).0 - s.sample_clean(t - h).0) / (2.0 * h);
            assert_abs_diff_eq!(dv, fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn bound_dominates_sampled_second_derivative() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let specs = [
            sec6_signal(),
            SignalSpec::Sinusoid {
                amplitude: -0.3,
                omega: 5.0,
                phase: 1.0,
                offset: 2.0,
            },
            SignalSpec::Polynomial {
                c0: 1.0,
                c1: -2.0,
                c2: 0.7,
            },
        ];
        for s in &specs {
            let l2 = s.second_derivative_bound();
            for _ in 0..10_000 {
                let t: f64 = rng.gen_range(-100.0..100.0);
                assert!(s.sample_clean(t).2.abs() <= l2 + 1e-12);
            }
        }
    }

    #[test]
    fn noise_none_is_zero() {
        for t in [0.0, 1.0, -2.5] {
            assert_eq!(NoiseSpec::None.sample(t), 0.0);
        }
    }

    #[test]
    fn sinusoidal_noise_at_zero() {
        let n = NoiseSpec::Sinusoidal {
            epsilon: 0.01,
            noise_omega: 1000.0,
        };
        assert_eq!(n.sample(0.0), 0.0);
    }

    #[test]
    fn seeded_uniform_is_deterministic_and_bounded() {
        let n = NoiseSpec::SeededUniform {
            epsilon: 0.01,
            seed: 42,
        };
        let a = n.sample(0.1);
        let b = n.sample(0.1);
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a.abs() <= 0.01);
        // exhaustive check over a simulation-sized grid
        for k in 0..100_000 {
            let d = n.sample(k as f64 * 1e-4);
            assert!(d.abs() <= 0.01, "sample {d} out of bound at step {k}");
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = NoiseSpec::SeededUniform {
            epsilon: 1.0,
            seed: 1,
        };
        let b = NoiseSpec::SeededUniform {
            epsilon: 1.0,
            seed: 2,
        };
        let hits = (0..100)
            .filter(|k| a.sample(*k as f64) == b.sample(*k as f64))
            .count();
        assert!(hits < 3);
    }

    #[test]
    fn uniform_01_covers_the_unit_interval() {
        let mut lo = 1.0f64;
        let mut hi = 0.0f64;
        for k in 0..10_000u64 {
            let u = uniform_01(9, k);
            assert!((0.0..1.0).contains(&u));
            lo = lo.min(u);
            hi = hi.max(u);
        }
        assert!(lo < 0.01 && hi > 0.99);
    }
}
