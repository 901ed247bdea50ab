//! Phase-space Monte Carlo kernels for pulsed cavity optomechanics.
//!
//! The crate simulates a driven optomechanical cavity in two stochastic
//! phase-space representations: the positive-P representation, which is
//! exact, and the truncated Wigner representation, which is approximate
//! but cheaper. Trajectory ensembles yield quadrature covariances of the
//! mechanical mode and a temporally filtered output light mode, from
//! which entanglement and EPR-steering witnesses are computed.
//!
//! A dense master-equation integrator on a truncated Fock space
//! ([`oracle`]) provides ground truth for small instances.
//!
//! All integration kernels work in scaled units (rates divided by the
//! cavity decay rate, times multiplied by it); see [`params::ScaledParams`].
//!
//! The crate is `no_std` (with `alloc`); IO, parallel ensemble execution
//! and the command line live in the companion `phasespace` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod estimators;
pub mod moments;
pub mod oracle;
pub mod params;
pub mod pulse;
pub mod rng;
pub mod sde;

pub use error::Error;
pub use params::{PhysicalParams, ScaledParams};
pub use pulse::PulseEnvelope;

/// Complex double, the working scalar of every kernel.
pub type C64 = num_complex::Complex<f64>;
