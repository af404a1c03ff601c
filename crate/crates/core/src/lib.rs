//! Diffuse-interface model of compressible, chemically reacting electrolytes
//! in one space dimension, with thermodynamic-consistency checks and
//! sharp-interface verification tools.
//!
//! The crate is organised bottom-up:
//!
//! - [`thermo`]: free energy model, chemical potentials, pressure.
//! - [`reactions`]: stoichiometry and mass production.
//! - [`transport`]: Onsager mobilities and diffusion fluxes.
//! - [`grid`], [`poisson`]: discretization and electrostatics.
//! - [`evolution`]: the operator-split time integrator.
//! - [`energy`]: free energy functional and entropy production.
//! - [`sharp`]: inner-layer solvers, jump-condition residuals and the
//!   δ-convergence study.
//! - [`config`], [`presets`], [`output`], [`driver`]: configuration and
//!   file-producing drivers used by the `pfe` binary.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod driver;
pub mod energy;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod linalg;
pub mod output;
pub mod poisson;
pub mod presets;
pub mod reactions;
pub mod sharp;
pub mod thermo;
pub mod transport;

pub use error::{Error, Result};
