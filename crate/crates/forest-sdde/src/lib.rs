//! # forest-sdde
//!
//! Simulation of the n-species forest growth model with state-dependent
//! maturation delays, plus numerical verification of its structural
//! properties.
//!
//! The state of species `i` is its adult count `A_i(t)` together with the
//! maturation delay `tau_i(t)`, coupled through the crowding pressure
//! `Z_i = sum_j zeta_ij A_j` and a positive decreasing competition function
//! `f_i`:
//!
//! ```text
//! A_i'(t)   = -mu_A A_i(t) + beta e^{-mu_J tau_i(t)}
//!             * [f_i(Z_i(t)) / f_i(Z_i(t - tau_i(t)))] * A_i(t - tau_i(t))
//! tau_i'(t) = 1 - f_i(Z_i(t)) / f_i(Z_i(t - tau_i(t)))
//! ```
//!
//! The delay is equivalently pinned by the threshold condition that the
//! integral of `f_i(Z_i)` over `[t - tau_i(t), t]` stays equal to its initial
//! value `C_i`; the crate integrates the ODE form and uses the integral form
//! as an independent cross-check.
//!
//! ## Layout
//!
//! - [`model`] - parameterization, competition functions, normalization
//!   constants, closed-form equilibrium
//! - [`history`] - dense output (cubic Hermite continuous extension)
//! - [`delay`] - both delay formulations, conservation residual, breaking
//!   point location
//! - [`integrator`] - fixed-step RK4 with delayed lookups, within-step
//!   fixed-point correction and breaking-point restarts
//! - [`smith`] - change of time variable to a constant-delay equation
//!   (single species), solved by the method of steps as a cross-validator
//! - [`pde`] - the originating size-structured PDE solved by upwind finite
//!   differences, an independent low-level oracle
//! - [`verify`] - property suites (conservation, lag monotonicity,
//!   boundedness, dissipativity, proof certificates) and structured reports
//! - [`io`] - config parsing, CSV/JSON artifacts, parameter sweeps
//!
//! Runnable demonstrations of each capability live in `examples/`; the thin
//! `forest-sdde` binary exposes `run`, `verify`, `sweep` and `equilibrium`
//! subcommands over the same library calls.
//!
//! ## Example
//!
//! ```
//! use forest_sdde::{fixtures, integrator};
//!
//! let config = fixtures::f1();
//! let settings = integrator::IntegratorSettings::new(1e-2, 30.0);
//! let out = integrator::solve(&config, &settings).unwrap();
//! let a = out.trajectory.eval_state(0, 30.0).unwrap();
//! assert!(a > 1.0);
//! ```

pub mod delay;
pub mod error;
pub mod fixtures;
pub mod history;
pub mod integrator;
pub mod io;
pub mod model;
pub mod pde;
pub mod quad;
pub mod root;
pub mod smith;
pub mod verify;

pub use error::{Error, Result};
