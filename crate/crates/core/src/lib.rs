//! Steady-state simulation of a flux-tunable transmon coupled to a coplanar
//! waveguide cavity and a nanomechanical resonator.
//!
//! Internally ħ = 1 and every energy or rate is an angular frequency in rad/s.
//! Helpers in [`units`] convert from the ordinary frequencies (Hz) used at
//! the configuration boundary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod device;
pub mod error;
pub mod hamiltonian;
pub mod lindblad;
pub mod opalg;
pub mod params;
pub mod spectroscopy;
pub mod transmon;
pub mod units;

pub use error::{Error, Result};
pub use params::DeviceParams;
pub use units::Tolerances;
