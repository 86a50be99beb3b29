//! Admittance seen by the transmon through the filtered cavity and the
//! nanoresonator branch, and the radiative T1 it implies.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Uniform lossless transmission line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSegment {
    /// Characteristic impedance (Ω).
    pub impedance: f64,
    /// Phase velocity (m/s).
    pub velocity: f64,
    pub length: f64,
}

impl LineSegment {
    /// Admittance looking into the line when its far end sees `load`.
    fn input_admittance(&self, omega: f64, load: C64) -> C64 {
        let theta = omega * self.length / self.velocity;
        let (s, c) = theta.sin_cos();
        let a = C64::new(c, 0.0);
        let b = I * self.impedance * s;
        let cc = I * s / self.impedance;
        (cc + a * load) / (a + b * load)
    }

    fn halved(&self) -> Self {
        Self {
            length: 0.5 * self.length,
            ..*self
        }
    }
}

/// Lumped filter element, listed from the cavity outward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum FilterElement {
    SeriesInductor(f64),
    SeriesCapacitor(f64),
    ShuntInductor(f64),
    ShuntCapacitor(f64),
}

impl FilterElement {
    fn value(&self) -> f64 {
        match *self {
            Self::SeriesInductor(v) | Self::SeriesCapacitor(v) | Self::ShuntInductor(v) | Self::ShuntCapacitor(v) => v,
        }
    }

    /// Admittance after this element when what lies beyond it presents `y`.
    fn apply(&self, omega: f64, y: C64) -> C64 {
        match *self {
            Self::SeriesInductor(l) => y / (C64::new(1.0, 0.0) + I * omega * l * y),
            Self::SeriesCapacitor(c) => {
                let yc = I * omega * c;
                yc * y / (yc + y)
            }
            Self::ShuntInductor(l) => y + C64::new(1.0, 0.0) / (I * omega * l),
            Self::ShuntCapacitor(c) => y + I * omega * c,
        }
    }
}

/// Series R–L–C branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRlc {
    pub resistance: f64,
    pub inductance: f64,
    pub capacitance: f64,
}

impl SeriesRlc {
    pub fn admittance(&self, omega: f64) -> C64 {
        let z = C64::new(self.resistance, omega * self.inductance) + C64::new(1.0, 0.0) / (I * omega * self.capacitance);
        C64::new(1.0, 0.0) / z
    }

    pub fn resonance(&self) -> f64 {
        1.0 / (self.inductance * self.capacitance).sqrt()
    }
}

/// Series RLC whose resonant damping of a transmon with shunt capacitance
/// `c_b` equals the cold-limit noise rate 4λ²/κ_NR.
pub fn nr_branch_for_coupling(nr_freq: f64, quality: f64, lambda: f64, c_b: f64) -> Result<SeriesRlc> {
    if !(nr_freq > 0.0) || !(quality > 0.0) || !(c_b > 0.0) {
        return Err(Error::param("nr_freq/quality/c_b", "must be positive"));
    }
    if !(lambda != 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", "must be nonzero for the branch to exist"));
    }
    let kappa = nr_freq / quality;
    let resistance = kappa / (4.0 * lambda * lambda * c_b);
    let inductance = quality * resistance / nr_freq;
    Ok(SeriesRlc {
        resistance,
        inductance,
        capacitance: 1.0 / (nr_freq * nr_freq * inductance),
    })
}

/// The transmon's electromagnetic environment.
///
/// The transmon couples through `coupling_capacitance` to one end of a
/// half-wave cavity whose ends connect through `port_capacitance` to
/// `port_impedance`; the filter hangs off the cavity midpoint and ends in
/// `filter_termination`. The optional NR branch shunts the transmon node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitNetwork {
    /// C_B (F).
    pub shunt_capacitance: f64,
    /// C_c (F).
    pub coupling_capacitance: f64,
    /// C_k (F).
    pub port_capacitance: f64,
    pub port_impedance: f64,
    pub cavity: LineSegment,
    pub filter: Vec<FilterElement>,
    pub filter_termination: f64,
    pub nr_branch: Option<SeriesRlc>,
}

impl Default for CircuitNetwork {
    fn default() -> Self {
        Self {
            shunt_capacitance: 90e-15,
            coupling_capacitance: 10e-15,
            port_capacitance: 10e-15,
            port_impedance: 50.0,
            cavity: LineSegment {
                impedance: 50.0,
                velocity: 1.19e8,
                length: 11.87e-3,
            },
            filter: vec![
                FilterElement::SeriesInductor(3.98e-9),
                FilterElement::ShuntCapacitor(3.18e-12),
                FilterElement::SeriesInductor(3.98e-9),
            ],
            filter_termination: 50.0,
            nr_branch: None,
        }
    }
}

/// Admittance and derived quantities at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiativeSample {
    pub omega: f64,
    pub admittance: C64,
    /// C_B/Re[Y] (s), absent where Re[Y] ≤ 0 or Y is singular.
    pub t1: Option<f64>,
    /// 1/(πT2) with 1/T2 = 1/(2T1) + 1/T_φ (Hz).
    pub linewidth: Option<f64>,
}

impl CircuitNetwork {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("shunt_capacitance", self.shunt_capacitance),
            ("coupling_capacitance", self.coupling_capacitance),
            ("port_capacitance", self.port_capacitance),
            ("port_impedance", self.port_impedance),
            ("cavity.impedance", self.cavity.impedance),
            ("cavity.velocity", self.cavity.velocity),
            ("cavity.length", self.cavity.length),
            ("filter_termination", self.filter_termination),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        if self.filter.iter().any(|e| !(e.value() > 0.0 && e.value().is_finite())) {
            return Err(Error::param("filter", "element values must be positive"));
        }
        if let Some(b) = &self.nr_branch {
            for (name, v) in [
                ("nr_branch.resistance", b.resistance),
                ("nr_branch.inductance", b.inductance),
                ("nr_branch.capacitance", b.capacitance),
            ] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::param(name, "must be positive"));
                }
            }
        }
        Ok(())
    }

    fn port(&self, omega: f64) -> C64 {
        let yc = I * omega * self.port_capacitance;
        yc / (C64::new(1.0, 0.0) + yc * self.port_impedance)
    }

    /// Admittance of the cavity seen from the transmon end.
    pub fn cavity_admittance(&self, omega: f64) -> C64 {
        let half = self.cavity.halved();
        let far = half.input_admittance(omega, self.port(omega));
        let filter = self
            .filter
            .iter()
            .rev()
            .fold(C64::new(1.0 / self.filter_termination, 0.0), |y, e| e.apply(omega, y));
        self.port(omega) + half.input_admittance(omega, far + filter)
    }

    /// Total admittance Y(ω) presented to the transmon junction.
    pub fn admittance(&self, omega: f64) -> Result<C64> {
        let yc = I * omega * self.coupling_capacitance;
        let cav = self.cavity_admittance(omega);
        let mut y = yc * cav / (yc + cav);
        if let Some(b) = &self.nr_branch {
            y += b.admittance(omega);
        }
        if !(y.re.is_finite() && y.im.is_finite()) {
            return Err(Error::SingularFrequency { omega });
        }
        Ok(y)
    }

    /// T1 = C_B/Re[Y(ω01)].
    pub fn radiative_t1(&self, omega01: f64) -> Result<f64> {
        let y = self.admittance(omega01)?;
        if !(y.re > 0.0) {
            return Err(Error::param("admittance", format!("Re[Y] = {:.3e} S is not positive", y.re)));
        }
        Ok(self.shunt_capacitance / y.re)
    }

    /// Admittance, T1 and linewidth over `omegas`; singular points carry an
    /// infinite admittance and no T1.
    pub fn curve(&self, omegas: &[f64], t_phi: Option<f64>) -> Vec<RadiativeSample> {
        omegas
            .par_iter()
            .map(|&omega| {
                let admittance = self
                    .admittance(omega)
                    .unwrap_or(C64::new(f64::INFINITY, f64::INFINITY));
                let t1 = self.radiative_t1(omega).ok();
                let dephasing = t_phi.map_or(0.0, |t| 1.0 / t);
                let linewidth = t1.map(|t1| (0.5 / t1 + dephasing) / std::f64::consts::PI);
                RadiativeSample {
                    omega,
                    admittance,
                    t1,
                    linewidth,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_rlc_is_resistive_on_resonance() {
        let b = SeriesRlc {
            resistance: 7.0,
            inductance: 2e-9,
            capacitance: 3e-12,
        };
        let y = b.admittance(b.resonance());
        assert!((y.re - 1.0 / 7.0).abs() < 1e-9 && y.im.abs() < 1e-9);
    }

    #[test]
    fn zero_coupling_has_no_branch() {
        assert!(nr_branch_for_coupling(2e10, 150.0, 0.0, 9e-14).is_err());
    }
}
