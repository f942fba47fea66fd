//! TOML scenario files: one signal + noise model + integration setup, run
//! against a list of differentiator families.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::differentiators::{GredParams, HybridParams, LevantParams, LinearParams};
use crate::differentiators::FirstOrderKind;
use crate::integrator::{FamilySim, SimConfig};
use crate::signals::{NoiseSpec, SignalSpec};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("unknown override path '{0}'")]
    UnknownPath(String),
}

/// Metric evaluation settings; window bounds default to the last fifth of
/// the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub steady_window_start: Option<f64>,
    pub steady_window_end: Option<f64>,
    pub settle_tol: Option<f64>,
}

impl MetricsConfig {
    /// Concrete `(start, end, tol)` for a run of length `t_end`.
    pub fn resolve(&self, t_end: f64) -> (f64, f64, f64) {
        (
            self.steady_window_start.unwrap_or(0.8 * t_end),
            self.steady_window_end.unwrap_or(t_end),
            self.settle_tol.unwrap_or(1e-2),
        )
    }
}

/// One schedule step: switch to `params` at the first grid point at or after
/// `at`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub at: f64,
    pub params: HybridParams,
}

/// A differentiator family entry of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    /// Continuous hybrid differentiator, optionally with a gain schedule.
    Hybrid {
        label: Option<String>,
        params: HybridParams,
        #[serde(default)]
        schedule: Vec<ScheduleEntry>,
    },
    /// Hybrid structure with `alpha = 0` (discontinuous correction terms).
    HybridDiscontinuous {
        label: Option<String>,
        k1: f64,
        k2: f64,
        k3: f64,
        k4: f64,
    },
    /// Purely nonlinear differentiator: hybrid with the linear gains zeroed.
    Nonlinear {
        label: Option<String>,
        k1: f64,
        k3: f64,
        alpha: f64,
    },
    Levant {
        label: Option<String>,
        params: LevantParams,
    },
    Linear {
        label: Option<String>,
        params: LinearParams,
    },
    Gred {
        label: Option<String>,
        params: GredParams,
    },
    FirstOrder {
        label: Option<String>,
        system: FirstOrderKind,
    },
}

impl FamilyConfig {
    /// Display label: explicit if set, otherwise the kind name.
    pub fn label(&self) -> &str {
        let (label, default) = match self {
            FamilyConfig::Hybrid { label, .. } => (label, "hybrid"),
            FamilyConfig::HybridDiscontinuous { label, .. } => (label, "hybrid-discontinuous"),
            FamilyConfig::Nonlinear { label, .. } => (label, "nonlinear"),
            FamilyConfig::Levant { label, .. } => (label, "levant"),
            FamilyConfig::Linear { label, .. } => (label, "linear"),
            FamilyConfig::Gred { label, .. } => (label, "gred"),
            FamilyConfig::FirstOrder { label, .. } => (label, "first-order"),
        };
        label.as_deref().unwrap_or(default)
    }

    /// Lower to the simulator representation.
    pub fn to_sim(&self) -> FamilySim {
        match self {
            FamilyConfig::Hybrid {
                params, schedule, ..
            } => {
                let mut sched = vec![(0.0, *params)];
                sched.extend(schedule.iter().map(|s| (s.at, s.params)));
                FamilySim::Hybrid { schedule: sched }
            }
            FamilyConfig::HybridDiscontinuous { k1, k2, k3, k4, .. } => FamilySim::Hybrid {
                schedule: vec![(
                    0.0,
                    HybridParams {
                        k1: *k1,
                        k2: *k2,
                        k3: *k3,
                        k4: *k4,
                        alpha: 0.0,
                    },
                )],
            },
            FamilyConfig::Nonlinear { k1, k3, alpha, .. } => FamilySim::Hybrid {
                schedule: vec![(
                    0.0,
                    HybridParams {
                        k1: *k1,
                        k2: 0.0,
                        k3: *k3,
                        k4: 0.0,
                        alpha: *alpha,
                    },
                )],
            },
            FamilyConfig::Levant { params, .. } => FamilySim::Levant(*params),
            FamilyConfig::Linear { params, .. } => FamilySim::Linear(*params),
            FamilyConfig::Gred { params, .. } => FamilySim::Gred(*params),
            FamilyConfig::FirstOrder { system, .. } => FamilySim::FirstOrder(*system),
        }
    }

    fn validate(&self, path: &str) -> Result<(), String> {
        match self {
            FamilyConfig::Hybrid {
                params, schedule, ..
            } => {
                params.validate(&format!("{path}.params"))?;
                let mut last = 0.0f64;
                for (i, entry) in schedule.iter().enumerate() {
                    let p = format!("{path}.schedule[{i}]");
                    if !(entry.at.is_finite() && entry.at > 0.0) {
                        return Err(format!("{p}.at: must be > 0, got {}", entry.at));
                    }
                    if entry.at <= last {
                        return Err(format!(
                            "{p}.at: switch times must be strictly increasing"
                        ));
                    }
                    last = entry.at;
                    entry.params.validate(&format!("{p}.params"))?;
                }
                Ok(())
            }
            FamilyConfig::HybridDiscontinuous { k1, k2, k3, k4, .. } => HybridParams {
                k1: *k1,
                k2: *k2,
                k3: *k3,
                k4: *k4,
                alpha: 0.0,
            }
            .validate(path),
            FamilyConfig::Nonlinear { k1, k3, alpha, .. } => HybridParams {
                k1: *k1,
                k2: 0.0,
                k3: *k3,
                k4: 0.0,
                alpha: *alpha,
            }
            .validate(path),
            FamilyConfig::Levant { params, .. } => params.validate(&format!("{path}.params")),
            FamilyConfig::Linear { params, .. } => params.validate(&format!("{path}.params")),
            FamilyConfig::Gred { params, .. } => params.validate(&format!("{path}.params")),
            FamilyConfig::FirstOrder { .. } => Ok(()),
        }
    }
}

/// A complete simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub signal: SignalSpec,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    pub sim: SimConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    pub families: Vec<FamilyConfig>,
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::None
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = toml::from_str(text)?;
        s.validate().map_err(ScenarioError::Validation)?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.name.trim().is_empty() {
            return Err("name: must be nonempty".into());
        }
        self.signal.validate()?;
        self.noise.validate()?;
        self.sim.validate()?;
        if self.families.is_empty() {
            return Err("families: at least one family is required".into());
        }
        for (i, f) in self.families.iter().enumerate() {
            f.validate(&format!("families[{i}]"))?;
        }
        let (start, end, tol) = self.metrics.resolve(self.sim.t_end);
        if !(0.0..=self.sim.t_end).contains(&start) || end > self.sim.t_end || start > end {
            return Err(format!(
                "metrics: steady window [{start}, {end}] must lie inside [0, {}]",
                self.sim.t_end
            ));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(format!("metrics.settle_tol: must be > 0, got {tol}"));
        }
        Ok(())
    }

    /// Non-fatal issues worth printing: currently, sliding-mode gains that
    /// cannot dominate the signal's second derivative.
    pub fn warnings(&self) -> Vec<String> {
        let l2 = self.signal.second_derivative_bound();
        let mut out = Vec::new();
        for (i, f) in self.families.iter().enumerate() {
            let lambda1 = match f {
                FamilyConfig::Levant { params, .. } => Some(params.lambda1),
                FamilyConfig::Gred { params, .. } => Some(params.levant.lambda1),
                _ => None,
            };
            if let Some(lambda1) = lambda1 {
                if lambda1 <= l2 {
                    out.push(format!(
                        "families[{i}] ({}): lambda1 = {lambda1} does not exceed the \
                         signal's second-derivative bound {l2}; exact tracking is not \
                         guaranteed",
                        f.label()
                    ));
                }
            }
        }
        out
    }

    /// Set one numeric field addressed by a dotted path, for sweeps and CLI
    /// overrides. Supported: `sim.dt`, `sim.t_end`, `signal.amplitude`,
    /// `signal.omega`, `noise.epsilon`, `noise.noise_omega`, and
    /// `families.<i>.<param>` for the family's own numeric gains.
    pub fn set_path(&mut self, path: &str, value: f64) -> Result<(), ScenarioError> {
        let unknown = || ScenarioError::UnknownPath(path.to_string());
        let parts: Vec<&str> = path.split('.').collect();
        match parts.as_slice() {
            ["sim", "dt"] => self.sim.dt = value,
            ["sim", "t_end"] => self.sim.t_end = value,
            ["signal", "amplitude"] => match &mut self.signal {
                SignalSpec::Sinusoid { amplitude, .. } => *amplitude = value,
                _ => return Err(unknown()),
            },
            ["signal", "omega"] => match &mut self.signal {
                SignalSpec::Sinusoid { omega, .. } => *omega = value,
                _ => return Err(unknown()),
            },
            ["noise", "epsilon"] => match &mut self.noise {
                NoiseSpec::SeededUniform { epsilon, .. }
                | NoiseSpec::Sinusoidal { epsilon, .. } => *epsilon = value,
                NoiseSpec::None => return Err(unknown()),
            },
            ["noise", "noise_omega"] => match &mut self.noise {
                NoiseSpec::Sinusoidal { noise_omega, .. } => *noise_omega = value,
                _ => return Err(unknown()),
            },
            ["families", idx, field] => {
                let i: usize = idx.parse().map_err(|_| unknown())?;
                let fam = self.families.get_mut(i).ok_or_else(unknown)?;
                *set_family_field(fam, field).ok_or_else(unknown)? = value;
            }
            _ => return Err(unknown()),
        }
        self.validate().map_err(ScenarioError::Validation)
    }
}

/// Mutable reference to a family's named numeric gain, if it has one.
fn set_family_field<'a>(fam: &'a mut FamilyConfig, field: &str) -> Option<&'a mut f64> {
    match fam {
        FamilyConfig::Hybrid { params, .. } => match field {
            "k1" => Some(&mut params.k1),
            "k2" => Some(&mut params.k2),
            "k3" => Some(&mut params.k3),
            "k4" => Some(&mut params.k4),
            "alpha" => Some(&mut params.alpha),
            _ => None,
        },
        FamilyConfig::HybridDiscontinuous { k1, k2, k3, k4, .. } => match field {
            "k1" => Some(k1),
            "k2" => Some(k2),
            "k3" => Some(k3),
            "k4" => Some(k4),
            _ => None,
        },
        FamilyConfig::Nonlinear { k1, k3, alpha, .. } => match field {
            "k1" => Some(k1),
            "k3" => Some(k3),
            "alpha" => Some(alpha),
            _ => None,
        },
        FamilyConfig::Levant { params, .. } => match field {
            "lambda1" => Some(&mut params.lambda1),
            "lambda2" => Some(&mut params.lambda2),
            _ => None,
        },
        FamilyConfig::Linear { params, .. } => match field {
            "a1" => Some(&mut params.a1),
            "a2" => Some(&mut params.a2),
            "tau" => Some(&mut params.tau),
            _ => None,
        },
        FamilyConfig::Gred { params, .. } => match field {
            "lambda1" => Some(&mut params.levant.lambda1),
            "lambda2" => Some(&mut params.levant.lambda2),
            "a1" => Some(&mut params.linear.a1),
            "a2" => Some(&mut params.linear.a2),
            "tau" => Some(&mut params.linear.tau),
            "eps_p" => Some(&mut params.eps_p),
            "c_p" => Some(&mut params.c_p),
            "eps_d" => Some(&mut params.eps_d),
            "c_d" => Some(&mut params.c_d),
            _ => None,
        },
        FamilyConfig::FirstOrder { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::Method;

    const SAMPLE: &str = r#"
name = "noisy-tracking"
description = "hybrid vs levant under bounded noise"

[signal]
kind = "sinusoid"
amplitude = 2.0
omega = 1.0

[noise]
kind = "seeded-uniform"
epsilon = 0.01
seed = 42

[sim]
dt = 1e-4
t_end = 10.0
method = "rk4"
x0 = { x1 = 0.0, x2 = 0.0 }

[metrics]
steady_window_start = 8.0
steady_window_end = 10.0
settle_tol = 1e-2

[[families]]
kind = "hybrid"
params = { k1 = 1.0, k2 = 7.0, k3 = 8.0, k4 = 25.0, alpha = 0.2 }

[[families.schedule]]
at = 1.0
params = { k1 = 1.0, k2 = 1.0, k3 = 8.0, k4 = 8.0, alpha = 0.2 }

[[families]]
kind = "levant"
label = "sliding"
params = { lambda1 = 28.0, lambda2 = 6.0 }
"#;

    #[test]
    fn parses_and_validates_sample() {
        let s = Scenario::from_toml_str(SAMPLE).unwrap();
        assert_eq!(s.name, "noisy-tracking");
        assert_eq!(s.sim.method, Method::Rk4);
        assert_eq!(s.families.len(), 2);
        assert_eq!(s.families[0].label(), "hybrid");
        assert_eq!(s.families[1].label(), "sliding");
        assert_eq!(s.metrics.resolve(s.sim.t_end), (8.0, 10.0, 1e-2));
        assert!(s.warnings().is_empty());
    }

    #[test]
    fn round_trips_through_toml() {
        let s = Scenario::from_toml_str(SAMPLE).unwrap();
        let text = s.to_toml_string();
        let back = Scenario::from_toml_str(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = SAMPLE.replace("settle_tol", "settle_tolerance");
        assert!(matches!(
            Scenario::from_toml_str(&bad),
            Err(ScenarioError::Parse(_))
        ));
    }

    #[test]
    fn invalid_values_name_the_field() {
        let bad = SAMPLE.replace("alpha = 0.2 }", "alpha = 1.5 }");
        let err = Scenario::from_toml_str(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("families[0]") && msg.contains("alpha"), "{msg}");
    }

    #[test]
    fn schedule_times_must_increase() {
        let bad = SAMPLE.replace("at = 1.0", "at = -1.0");
        let err = Scenario::from_toml_str(&bad).unwrap_err();
        assert!(err.to_string().contains("schedule[0].at"));
    }

    #[test]
    fn to_sim_lowers_reduced_variants() {
        let f = FamilyConfig::Nonlinear {
            label: None,
            k1: 6.0,
            k3: 9.0,
            alpha: 0.2,
        };
        let FamilySim::Hybrid { schedule } = f.to_sim() else {
            panic!("expected hybrid dynamics");
        };
        assert_eq!(schedule[0].1.k2, 0.0);
        assert_eq!(schedule[0].1.k4, 0.0);
        let d = FamilyConfig::HybridDiscontinuous {
            label: None,
            k1: 1.0,
            k2: 1.0,
            k3: 8.0,
            k4: 8.0,
        };
        let FamilySim::Hybrid { schedule } = d.to_sim() else {
            panic!("expected hybrid dynamics");
        };
        assert_eq!(schedule[0].1.alpha, 0.0);
    }

    #[test]
    fn levant_warning_when_gain_below_signal_bound() {
        let weak = SAMPLE.replace("lambda1 = 28.0", "lambda1 = 1.5");
        let s = Scenario::from_toml_str(&weak).unwrap();
        let warnings = s.warnings();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("lambda1"));
    }

    #[test]
    fn path_overrides() {
        let mut s = Scenario::from_toml_str(SAMPLE).unwrap();
        s.set_path("sim.dt", 1e-3).unwrap();
        assert_eq!(s.sim.dt, 1e-3);
        s.set_path("noise.epsilon", 0.02).unwrap();
        s.set_path("families.1.lambda1", 30.0).unwrap();
        let FamilyConfig::Levant { params, .. } = &s.families[1] else {
            panic!()
        };
        assert_eq!(params.lambda1, 30.0);
        assert!(matches!(
            s.set_path("families.1.tau", 0.1),
            Err(ScenarioError::UnknownPath(_))
        ));
        assert!(matches!(
            s.set_path("nonsense", 1.0),
            Err(ScenarioError::UnknownPath(_))
        ));
        // overrides that break validity are rejected
        assert!(matches!(
            s.set_path("sim.dt", -1.0),
            Err(ScenarioError::Validation(_))
        ));
    }
}
