//! Deterministic fixed-step simulation of the differentiator families
//! against a measured signal.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::differentiators::{
    first_order_rhs, gred_output, hybrid_rhs, levant_rhs, linear_rhs, DiffState, FirstOrderKind,
    GredParams, HybridParams, LevantParams, LinearParams,
};
use crate::signals::{NoiseSpec, SignalSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Euler,
    Rk4,
}

/// Fixed-step integration setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// step size, seconds
    pub dt: f64,
    /// final time, seconds
    pub t_end: f64,
    pub method: Method,
    /// initial estimator state
    pub x0: DiffState,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(format!("sim.dt: must be > 0, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(format!("sim.t_end: must be > 0, got {}", self.t_end));
        }
        if self.dt > self.t_end {
            return Err(format!(
                "sim.dt: must be <= t_end ({} > {})",
                self.dt, self.t_end
            ));
        }
        if !self.x0.is_finite() {
            return Err("sim.x0: must be finite".into());
        }
        Ok(())
    }

    /// Number of integration steps; the emitted series has `steps() + 1`
    /// rows. Tolerant of the usual `t_end / dt` rounding.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt + 1e-9).floor() as usize
    }
}

/// A differentiator family instantiated for simulation.
///
/// The hybrid family carries its gain schedule (switch time, params) with
/// the first entry at `t = 0`; a switch takes effect at the first grid point
/// at or after its switch time. The example systems (17)-(19), (24) are not
/// separate variants: they are these dynamics driven by the zero signal.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySim {
    Hybrid { schedule: Vec<(f64, HybridParams)> },
    Levant(LevantParams),
    Linear(LinearParams),
    Gred(GredParams),
    FirstOrder(FirstOrderKind),
}

/// Sampled trajectories with truth columns. All columns have equal length
/// and `t` advances by a constant `dt`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub v0: Vec<f64>,
    pub dv0: Vec<f64>,
    pub v_meas: Vec<f64>,
}

impl TimeSeries {
    fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            x1: Vec::with_capacity(n),
            x2: Vec::with_capacity(n),
            v0: Vec::with_capacity(n),
            dv0: Vec::with_capacity(n),
            v_meas: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// CSV with header `t,x1,x2,v0,dv0,v_meas,e1,e2`, 9 fractional digits of
    /// scientific notation (10 significant digits), LF line endings.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(b"t,x1,x2,v0,dv0,v_meas,e1,e2\n")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
                self.t[i],
                self.x1[i],
                self.x2[i],
                self.v0[i],
                self.dv0[i],
                self.v_meas[i],
                self.x1[i] - self.v0[i],
                self.x2[i] - self.dv0[i],
            )?;
        }
        Ok(())
    }
}

/// Per-step sub-estimator states of a GRED run.
#[derive(Debug, Clone, Default)]
pub struct GredTrace {
    pub levant: Vec<DiffState>,
    pub linear: Vec<DiffState>,
}

/// Result of a simulation; `gred` is populated for the GRED family only
/// (its `series.x1/x2` columns hold the blended outputs).
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub series: TimeSeries,
    pub gred: Option<GredTrace>,
}

#[derive(Debug, Error)]
pub enum SimError {
    /// A state component overflowed or became NaN; reports the time and the
    /// last finite state. Signals an unstable gain/dt combination.
    #[error("non-finite state at t = {t} (last finite state x1 = {}, x2 = {})", last.x1, last.x2)]
    NonFiniteState { t: f64, last: DiffState },
}

/// Advance `state` by one step of the chosen scheme. The measured input is
/// already bound inside `rhs` and stays constant across RK4 substages
/// (sampled sensor model).
pub fn step<F>(method: Method, rhs: F, state: &DiffState, dt: f64) -> DiffState
where
    F: Fn(&DiffState) -> (f64, f64),
{
    match method {
        Method::Euler => {
            let (d1, d2) = rhs(state);
            DiffState::new(state.x1 + dt * d1, state.x2 + dt * d2)
        }
        Method::Rk4 => {
            let (a1, a2) = rhs(state);
            let (b1, b2) = rhs(&DiffState::new(
                state.x1 + 0.5 * dt * a1,
                state.x2 + 0.5 * dt * a2,
            ));
            let (c1, c2) = rhs(&DiffState::new(
                state.x1 + 0.5 * dt * b1,
                state.x2 + 0.5 * dt * b2,
            ));
            let (d1, d2) = rhs(&DiffState::new(state.x1 + dt * c1, state.x2 + dt * c2));
            DiffState::new(
                state.x1 + dt / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1),
                state.x2 + dt / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2),
            )
        }
    }
}

fn step_scalar<F>(method: Method, rhs: F, x: f64, dt: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    match method {
        Method::Euler => x + dt * rhs(x),
        Method::Rk4 => {
            let a = rhs(x);
            let b = rhs(x + 0.5 * dt * a);
            let c = rhs(x + 0.5 * dt * b);
            let d = rhs(x + dt * c);
            x + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        }
    }
}

/// Run a differentiator against `signal + noise` on the fixed dt grid.
///
/// The measured input `v_meas = v0 + delta` is sampled once per step and
/// held through the step, so noise paths are grid-defined and reproducible.
pub fn simulate(
    family: &FamilySim,
    signal: &SignalSpec,
    noise: &NoiseSpec,
    cfg: &SimConfig,
) -> Result<SimOutput, SimError> {
    let n = cfg.steps();
    let mut series = TimeSeries::with_capacity(n + 1);

    match family {
        FamilySim::FirstOrder(kind) => {
            let mut x = cfg.x0.x1;
            for k in 0..=n {
                let t = k as f64 * cfg.dt;
                let (v0, dv0, _) = signal.sample_clean(t);
                let v_meas = v0 + noise.sample(t);
                series.t.push(t);
                series.x1.push(x);
                series.x2.push(first_order_rhs(*kind, x));
                series.v0.push(v0);
                series.dv0.push(dv0);
                series.v_meas.push(v_meas);
                if k < n {
                    x = step_scalar(cfg.method, |x| first_order_rhs(*kind, x), x, cfg.dt);
                    if !x.is_finite() {
                        return Err(SimError::NonFiniteState {
                            t: (k + 1) as f64 * cfg.dt,
                            last: DiffState::new(series.x1[k], series.x2[k]),
                        });
                    }
                }
            }
            Ok(SimOutput { series, gred: None })
        }
        FamilySim::Gred(p) => {
            let mut lev = cfg.x0;
            let mut lin = cfg.x0;
            let mut trace = GredTrace::default();
            for k in 0..=n {
                let t = k as f64 * cfg.dt;
                let (v0, dv0, _) = signal.sample_clean(t);
                let v_meas = v0 + noise.sample(t);
                let (y1, y2) = gred_output(&lev, &lin, p);
                series.t.push(t);
                series.x1.push(y1);
                series.x2.push(y2);
                series.v0.push(v0);
                series.dv0.push(dv0);
                series.v_meas.push(v_meas);
                trace.levant.push(lev);
                trace.linear.push(lin);
                if k < n {
                    let last = (lev, lin);
                    lev = step(cfg.method, |s| levant_rhs(&p.levant, s, v_meas), &lev, cfg.dt);
                    lin = step(cfg.method, |s| linear_rhs(&p.linear, s, v_meas), &lin, cfg.dt);
                    if !lev.is_finite() || !lin.is_finite() {
                        let bad = if lev.is_finite() { last.1 } else { last.0 };
                        return Err(SimError::NonFiniteState {
                            t: (k + 1) as f64 * cfg.dt,
                            last: bad,
                        });
                    }
                }
            }
            Ok(SimOutput {
                series,
                gred: Some(trace),
            })
        }
        _ => {
            let mut state = cfg.x0;
            let mut sched_idx = 0usize;
            for k in 0..=n {
                let t = k as f64 * cfg.dt;
                let (v0, dv0, _) = signal.sample_clean(t);
                let v_meas = v0 + noise.sample(t);
                series.t.push(t);
                series.x1.push(state.x1);
                series.x2.push(state.x2);
                series.v0.push(v0);
                series.dv0.push(dv0);
                series.v_meas.push(v_meas);
                if k < n {
                    let prev = state;
                    state = match family {
                        FamilySim::Hybrid { schedule } => {
                            while sched_idx + 1 < schedule.len()
                                && t >= schedule[sched_idx + 1].0
                            {
                                sched_idx += 1;
                            }
                            let p = &schedule[sched_idx].1;
                            step(cfg.method, |s| hybrid_rhs(p, s, v_meas), &state, cfg.dt)
                        }
                        FamilySim::Levant(p) => {
                            step(cfg.method, |s| levant_rhs(p, s, v_meas), &state, cfg.dt)
                        }
                        FamilySim::Linear(p) => {
                            step(cfg.method, |s| linear_rhs(p, s, v_meas), &state, cfg.dt)
                        }
                        FamilySim::Gred(_) | FamilySim::FirstOrder(_) => unreachable!(),
                    };
                    if !state.is_finite() {
                        return Err(SimError::NonFiniteState {
                            t: (k + 1) as f64 * cfg.dt,
                            last: prev,
                        });
                    }
                }
            }
            Ok(SimOutput { series, gred: None })
        }
    }
}
