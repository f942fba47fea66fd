//! Simulation and analysis toolkit for second-order signal differentiators.
//!
//! The crate implements four differentiator families driven by a common
//! fixed-step integrator:
//!
//! * the continuous hybrid differentiator (fractional-power plus linear
//!   correction terms, with an optional discontinuous `alpha = 0` variant),
//! * Levant's robust exact (super-twisting) differentiator,
//! * the linear high-gain differentiator,
//! * the GRED blend of the previous two.
//!
//! On top of the simulators sit the Lyapunov certificate matrices with their
//! residual and noise bounds, describing-function linearizations, frequency
//! response curves, and trajectory metrics (settling time, steady-state
//! error, chattering index, noise-accuracy scaling).
//!
//! The `diffkit` binary exposes all of this through scenario files; see the
//! [`scenario`] and [`cli`] modules.

pub mod analysis;
pub mod cli;
pub mod differentiators;
pub mod integrator;
pub mod metrics;
pub mod scenario;
pub mod signals;
