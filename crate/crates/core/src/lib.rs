//! Coherence dynamics of a qubit coupled to a two-level fluctuator (TLF) that
//! is itself dissipated by a bosonic bath with a piezoelectric spectral
//! density.
//!
//! The pipeline runs bottom-up:
//!
//! 1. [`spectral`]: bath spectral density `J(ω)`.
//! 2. [`renorm`]: self-consistent renormalization factor `η` of the TLF
//!    splitting under the displacement transformation.
//! 3. [`tlfgreen`]: dressed TLF correlator `G(ω)`, its detailed-balance split,
//!    and the renormalized TLF frequency `ω_B`.
//! 4. [`dynamics`]: qubit self-energies and the population difference `P(t)`,
//!    plus its spectrum and half-width.
//! 5. [`poles`]: two-pole analysis of the rotating-wave propagator.
//!
//! [`pipeline`] strings the steps together for one parameter point.
//!
//! [`oracle`] diagonalizes the untransformed model with a few discrete bath
//! modes and is used to validate the approximation chain.
//!
//! Units: `ħ = k_B = 1`, energies in units of the bath cutoff `ω_l` (so
//! `ω_l = 1`), times in units of `1/ω_l`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod fmath;

pub mod dynamics;
pub mod grid;
pub mod numerics;
pub mod oracle;
pub mod params;
pub mod pipeline;
pub mod poles;
pub mod renorm;
pub mod spectral;
pub mod tlfgreen;

pub use error::Error;
pub use params::{SystemParams, Temperature};

/// Hard upper cutoff for every semi-infinite frequency integral over `J(ω)`.
/// The Gaussian factor of the piezoelectric density makes the tail beyond it
/// smaller than `1e-20`.
pub const OMEGA_MAX: f64 = 10.0;
