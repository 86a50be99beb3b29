//! Closed-form device estimators: beam mechanics, zero-point motion,
//! coupling strengths, thermal photon budgets and temperature bounds.

mod network;

pub use network::{
    nr_branch_for_coupling, CircuitNetwork, FilterElement, LineSegment, RadiativeSample, SeriesRlc,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{bose_occupation, temperature_for_occupation};
use crate::units::{BOLTZMANN, ELECTRON_CHARGE, HBAR};

/// Prismatic doubly clamped beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    /// In-plane width (m); sets the in-plane flexural stiffness.
    pub width: f64,
    pub thickness: f64,
    pub length: f64,
    /// Effective Young modulus (Pa).
    pub youngs_modulus: f64,
    /// Effective density (kg/m³).
    pub density: f64,
    pub k1: f64,
    pub k3: f64,
    pub alpha1: f64,
    pub alpha3: f64,
}

impl Default for BeamSpec {
    fn default() -> Self {
        Self {
            width: 45e-9,
            thickness: 100e-9,
            length: 700e-9,
            youngs_modulus: 116e9,
            density: 2966.0,
            k1: 1.028,
            k3: 5.555,
            alpha1: 0.3959,
            alpha3: 0.4358,
        }
    }
}

impl BeamSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("width", self.width),
            ("thickness", self.thickness),
            ("length", self.length),
            ("youngs_modulus", self.youngs_modulus),
            ("density", self.density),
            ("k1", self.k1),
            ("k3", self.k3),
            ("alpha1", self.alpha1),
            ("alpha3", self.alpha3),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        Ok(())
    }

    /// (k_n, α_n) for mode `n`.
    pub fn mode(&self, n: u32) -> Result<(f64, f64)> {
        match n {
            1 => Ok((self.k1, self.alpha1)),
            3 => Ok((self.k3, self.alpha3)),
            _ => Err(Error::param("mode", format!("no mode constant for n = {n}; known modes are 1 and 3"))),
        }
    }
}

/// f_n = k_n·(w/l²)·√(Y/ρ) in Hz.
pub fn beam_frequency(spec: &BeamSpec, n: u32) -> Result<f64> {
    spec.validate()?;
    let (k, _) = spec.mode(n)?;
    Ok(k * spec.width / (spec.length * spec.length) * (spec.youngs_modulus / spec.density).sqrt())
}

/// m_n = α_n·ρ·w·t·l.
pub fn effective_mass(spec: &BeamSpec, n: u32) -> Result<f64> {
    spec.validate()?;
    let (_, alpha) = spec.mode(n)?;
    Ok(alpha * spec.density * spec.width * spec.thickness * spec.length)
}

/// Thickness-weighted Young modulus and density of a layered beam.
///
/// Exploratory only: the simulations take the effective values as inputs.
pub fn composite_properties(layers: &[(f64, f64, f64)]) -> Result<(f64, f64)> {
    let total: f64 = layers.iter().map(|l| l.0).sum();
    if layers.is_empty() || !(total > 0.0) {
        return Err(Error::param("layers", "need at least one layer of positive thickness"));
    }
    let y = layers.iter().map(|&(t, y, _)| t * y).sum::<f64>() / total;
    let rho = layers.iter().map(|&(t, _, r)| t * r).sum::<f64>() / total;
    Ok((y, rho))
}

/// x_zp = √(ħ/2mω).
pub fn zero_point(mass: f64, omega: f64) -> Result<f64> {
    if !(mass > 0.0) || !(omega > 0.0) {
        return Err(Error::param("mass/omega", "must be positive"));
    }
    Ok((HBAR / (2.0 * mass * omega)).sqrt())
}

/// λ = −4(E_C/ħ)(dC/dx)(V/e)x_zp, with `charging` the angular frequency E_C/ħ.
pub fn coupling_strength(charging: f64, dc_dx: f64, voltage: f64, x_zp: f64) -> f64 {
    -4.0 * charging * dc_dx * voltage / ELECTRON_CHARGE * x_zp
}

/// [`coupling_strength`] with dC/dx ≈ C_NR/d.
pub fn coupling_approx(charging: f64, c_nr: f64, gap: f64, voltage: f64, x_zp: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::param("gap", "must be positive"));
    }
    Ok(coupling_strength(charging, c_nr / gap, voltage, x_zp))
}

/// V_zp = √(ħω/2C) of a resonator with capacitance `capacitance`.
pub fn zero_point_voltage(omega: f64, capacitance: f64) -> Result<f64> {
    if !(omega > 0.0) || !(capacitance > 0.0) {
        return Err(Error::param("omega/capacitance", "must be positive"));
    }
    Ok((HBAR * omega / (2.0 * capacitance)).sqrt())
}

/// g = 2βeV_zp/ħ.
pub fn cavity_g(beta: f64, v_zp: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::param("beta", "must lie in [0, 1)"));
    }
    Ok(2.0 * beta * ELECTRON_CHARGE * v_zp / HBAR)
}

/// Upper bound on the qubit temperature from a 0→1 peak of amplitude `a01`
/// and a 1→2 peak hidden below `3·sigma`.
pub fn qubit_temperature_bound(a01: f64, sigma: f64, omega01: f64) -> Result<f64> {
    if !(sigma >= 0.0) || !(omega01 > 0.0) {
        return Err(Error::param("sigma/omega01", "sigma must be nonnegative and omega01 positive"));
    }
    if sigma == 0.0 {
        return Ok(0.0);
    }
    if !(a01 > 3.0 * sigma) {
        return Err(Error::param("a01", "must exceed three noise widths for a bound to exist"));
    }
    Ok(HBAR * omega01 / (BOLTZMANN * (a01 / (3.0 * sigma)).ln()))
}

/// A thermal source seen through `attenuation_db` of attenuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalStage {
    pub temperature: f64,
    pub attenuation_db: f64,
}

impl ThermalStage {
    pub fn new(temperature: f64, attenuation_db: f64) -> Result<Self> {
        let s = Self {
            temperature,
            attenuation_db,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::param("temperature", "must be positive"));
        }
        if !(self.attenuation_db >= 0.0) {
            return Err(Error::param("attenuation_db", "must be nonnegative"));
        }
        Ok(())
    }

    /// The measured input line: room temperature down to the mixing chamber.
    pub fn input_chain() -> Vec<ThermalStage> {
        [(300.0, 66.0), (1.0, 36.0), (0.7, 30.0), (0.1, 20.0), (0.030, 0.0)]
            .iter()
            .map(|&(t, a)| ThermalStage {
                temperature: t,
                attenuation_db: a,
            })
            .collect()
    }
}

fn attenuate(n: f64, db: f64) -> f64 {
    n / 10f64.powf(db / 10.0)
}

/// n_in = Σ n(T_i)/10^{A_i/10}.
pub fn attenuated_population(stages: &[ThermalStage], omega: f64) -> Result<f64> {
    if stages.is_empty() {
        return Err(Error::InsufficientData { needed: 1, found: 0 });
    }
    let mut total = 0.0;
    for s in stages {
        s.validate()?;
        total += attenuate(bose_occupation(omega, s.temperature), s.attenuation_db);
    }
    Ok(total)
}

/// n_out = n(T_amp)/10^{D/10} + n(T_base).
pub fn output_population(amp_temperature: f64, isolation_db: f64, base_temperature: f64, omega: f64) -> Result<f64> {
    if !(isolation_db >= 0.0) {
        return Err(Error::param("isolation_db", "must be nonnegative"));
    }
    Ok(attenuate(bose_occupation(omega, amp_temperature), isolation_db) + bose_occupation(omega, base_temperature))
}

/// Occupation n_cpw = (n_in + n_out)/2 of a symmetric two-port cavity and its
/// effective temperature.
pub fn cavity_mode_temperature(n_in: f64, n_out: f64, omega: f64) -> Result<(f64, f64)> {
    if !(n_in >= 0.0) || !(n_out >= 0.0) {
        return Err(Error::param("n_in/n_out", "must be nonnegative"));
    }
    let n = 0.5 * (n_in + n_out);
    Ok((n, temperature_for_occupation(omega, n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_mode_is_rejected() {
        assert!(beam_frequency(&BeamSpec::default(), 2).is_err());
    }

    #[test]
    fn unit_alpha_gives_geometric_mass() {
        let s = BeamSpec {
            alpha3: 1.0,
            ..Default::default()
        };
        let m = effective_mass(&s, 3).unwrap();
        let geo = s.density * s.width * s.thickness * s.length;
        assert!((m - geo).abs() <= 1e-15 * geo);
    }

    #[test]
    fn bound_needs_visible_peak() {
        assert!(qubit_temperature_bound(5.0, 2.0, 1e10).is_err());
        assert_eq!(qubit_temperature_bound(5.0, 0.0, 1e10).unwrap(), 0.0);
    }

    #[test]
    fn zero_occupation_is_zero_temperature() {
        let (n, t) = cavity_mode_temperature(0.0, 0.0, 3e10).unwrap();
        assert_eq!((n, t), (0.0, 0.0));
    }
}
