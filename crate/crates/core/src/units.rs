//! Physical constants, unit conversions and numerical tolerances.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = PLANCK / TAU;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge (C).
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn angular(f_hz: f64) -> f64 {
    TAU * f_hz
}

/// Angular frequency (rad/s) to ordinary frequency (Hz).
#[inline]
pub fn hertz(omega: f64) -> f64 {
    omega / TAU
}

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative Frobenius deviation ‖A − A†‖/‖A‖ accepted as Hermitian.
    pub hermiticity: f64,
    /// Largest entry of vec(I)†·L accepted for a trace-preserving Liouvillian.
    pub trace_preservation: f64,
    /// Relative residual ‖Lρ‖/(‖L‖‖ρ‖) accepted for a steady state.
    pub steady_state_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace_preservation: 1e-10,
            steady_state_residual: 1e-8,
        }
    }
}
