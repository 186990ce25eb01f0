//! Steady-state Gaussian entanglement of a driven cavity-magnon-phonon system.
//!
//! The pipeline runs mean field → linearized drift and diffusion → stability
//! → Lyapunov covariance → logarithmic negativities and residual contangles.
//! [`sweep::evaluate`] runs it at one point; [`sweep::run_sweep`] maps it
//! over a grid in parallel.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod meanfield;
pub mod params;
pub mod sweep;

pub use dynamics::{CovarianceMatrix, LinearModel};
pub use entanglement::{EntanglementReport, Mode, Partition};
pub use error::{Error, Result};
pub use meanfield::{solve_steady_state, MeanFieldState};
pub use params::{DetuningMode, PhysicalParams};
pub use sweep::{evaluate, evaluate_point, optimize_phase, run_sweep, PumpMode, SweepRow, SweepSpec};
