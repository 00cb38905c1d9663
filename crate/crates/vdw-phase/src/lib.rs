//! Steady phase-transition states of a one-dimensional compressible van der
//! Waals fluid.
//!
//! At a subcritical temperature the van der Waals pressure is non-monotone in
//! the specific volume, so the steady mass–momentum system on a periodic
//! domain admits many weak solutions. This crate computes the objects that
//! organize them:
//!
//! - [`eos`] — the pressure law, its critical points, and every distinguished
//!   volume of the subcritical landscape (spinodal, Maxwell, and companion
//!   points),
//! - [`maxwell`] — the equal-area construction and the region classification
//!   (stable / metastable / unstable),
//! - [`sharp`] — piecewise-constant two-phase profiles that take only the
//!   Maxwell values, with phase lengths fixed by the mean volume,
//! - [`viscous`] — smooth periodic profiles of the artificial-viscosity
//!   regularization, found by solving the period/mass conditions on the first
//!   integral of the reduced ODE,
//! - [`energy`] — the variational functionals, the small-viscosity energy
//!   expansion, and the ordering that selects the two-interface state,
//! - [`stability`] — Fourier growth rates of constant states under density
//!   viscosity,
//! - [`limits`] — viscosity sweeps that measure how the smooth profiles
//!   sharpen into the piecewise-constant ones.
//!
//! The reduced normalization `a = 3`, `b = 1/3`, `R = 8/3` (critical point at
//! `v = 1`, `theta = 1`, `p = 1`) is used by all defaults; every function is
//! fully parametric in the constants.
//!
//! ```
//! use vdw_phase::{eos::EosParams, maxwell};
//!
//! let params = EosParams::reduced(0.85)?;
//! let landscape = maxwell::construct(&params)?;
//! assert!(landscape.alpha0 < landscape.alpha);
//! assert!(landscape.beta < landscape.beta0);
//! # Ok::<(), vdw_phase::Error>(())
//! ```

// `!(x > 0.0)` is used deliberately throughout: unlike `x <= 0.0` it also
// rejects NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod eos;
mod error;
pub mod limits;
pub mod maxwell;
pub mod potential;
pub mod sharp;
pub mod stability;
pub mod viscous;

#[doc(hidden)]
pub mod book;
mod quad;
mod report;
mod solve1d;

pub use error::{Error, Result};
pub use report::fmt_g17;
