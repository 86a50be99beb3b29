//! The device parameter record shared by every simulation.

use crate::error::{Error, Result};
use crate::lindblad::{BathSpec, MeasuredDecay};
use crate::opalg::HilbertLayout;
use crate::transmon::TransmonParams;
use crate::units::angular;

/// Every device quantity the simulations need, in internal units
/// (rad/s, s, K, V).
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    pub transmon: TransmonParams,
    /// Truncations (transmon, cavity, nanoresonator).
    pub dims: [usize; 3],
    pub cavity_freq: f64,
    pub nr_freq: f64,
    pub g01: f64,
    /// Fixed g_12; `None` scales it from g_01 by the charge matrix elements.
    pub g12: Option<f64>,
    /// λ per volt of nanoresonator bias (rad/s/V).
    pub lambda_per_volt: f64,
    pub t1: f64,
    pub t2_star: f64,
    pub kappa_nr: f64,
    /// Cavity linewidth versus |V_NR|, as (V, κ) knots sorted by voltage.
    pub kappa_cpw_schedule: Vec<(f64, f64)>,
    pub gamma12_ratio: f64,
    pub dephasing2_ratio: f64,
    pub transmon_temperature: f64,
    pub cavity_temperature: f64,
    /// Bare-cavity photon number set by the probe at resonance.
    pub drive_photons: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        let mhz = |f: f64| angular(f * 1e6);
        Self {
            transmon: TransmonParams::default(),
            dims: [3, 4, 5],
            cavity_freq: angular(4.94e9),
            nr_freq: angular(3.47e9),
            g01: mhz(120.0),
            g12: Some(mhz(180.0)),
            lambda_per_volt: angular(300e3),
            t1: 15e-6,
            t2_star: 1.4e-6,
            kappa_nr: mhz(23.0),
            kappa_cpw_schedule: vec![(0.0, mhz(0.28)), (4.5, mhz(0.28)), (5.5, mhz(0.37)), (6.5, mhz(1.08))],
            gamma12_ratio: 2.0,
            dephasing2_ratio: 2.0,
            transmon_temperature: 0.030,
            cavity_temperature: 0.045,
            drive_photons: 0.1,
        }
    }
}

impl DeviceParams {
    pub fn layout(&self) -> Result<HilbertLayout> {
        HilbertLayout::hybrid(self.dims[0], self.dims[1], self.dims[2])
    }

    /// κ_cpw at bias `voltage`, interpolated linearly in |V| and held flat
    /// outside the schedule.
    pub fn kappa_cpw_at(&self, voltage: f64) -> f64 {
        let v = voltage.abs();
        let s = &self.kappa_cpw_schedule;
        if v <= s[0].0 {
            return s[0].1;
        }
        for w in s.windows(2) {
            let ((v0, k0), (v1, k1)) = (w[0], w[1]);
            if v <= v1 {
                return k0 + (k1 - k0) * (v - v0) / (v1 - v0);
            }
        }
        s[s.len() - 1].1
    }

    /// λ = λ_per_volt·|V|.
    pub fn lambda_at(&self, voltage: f64) -> f64 {
        self.lambda_per_volt * voltage.abs()
    }

    /// Bias voltage producing coupling `lambda`.
    pub fn voltage_for_lambda(&self, lambda: f64) -> f64 {
        lambda / self.lambda_per_volt
    }

    /// E_d giving `drive_photons` bare-cavity photons at resonance.
    pub fn drive_amplitude(&self, kappa_cpw: f64) -> f64 {
        self.drive_photons.sqrt() * 0.5 * kappa_cpw
    }

    pub fn measured(&self, kappa_cpw: f64) -> MeasuredDecay {
        MeasuredDecay {
            t1: self.t1,
            t2_star: self.t2_star,
            kappa_cpw,
            kappa_nr: self.kappa_nr,
            gamma12_ratio: self.gamma12_ratio,
            dephasing2_ratio: self.dephasing2_ratio,
        }
    }

    pub fn bath(&self, nr_temperature: f64) -> BathSpec {
        BathSpec {
            transmon: self.transmon_temperature,
            cavity: self.cavity_temperature,
            nanoresonator: nr_temperature,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.transmon.validate()?;
        self.layout()?;
        for (name, v) in [
            ("cavity_freq", self.cavity_freq),
            ("nr_freq", self.nr_freq),
            ("t1", self.t1),
            ("t2_star", self.t2_star),
            ("kappa_nr", self.kappa_nr),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        for (name, v) in [
            ("g01", self.g01),
            ("lambda_per_volt", self.lambda_per_volt),
            ("gamma12_ratio", self.gamma12_ratio),
            ("dephasing2_ratio", self.dephasing2_ratio),
            ("transmon_temperature", self.transmon_temperature),
            ("cavity_temperature", self.cavity_temperature),
            ("drive_photons", self.drive_photons),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be nonnegative"));
            }
        }
        if self.t2_star > 2.0 * self.t1 {
            return Err(Error::param("t2_star", "exceeds 2·T1, which is unphysical"));
        }
        let s = &self.kappa_cpw_schedule;
        if s.is_empty() {
            return Err(Error::param("kappa_cpw_schedule", "needs at least one knot"));
        }
        if s.windows(2).any(|w| w[1].0 <= w[0].0) || s.iter().any(|&(v, k)| v < 0.0 || !(k > 0.0)) {
            return Err(Error::param(
                "kappa_cpw_schedule",
                "voltages must be nonnegative and increasing, linewidths positive",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::hertz;

    #[test]
    fn schedule_hits_table_values() {
        let p = DeviceParams::default();
        assert!((hertz(p.kappa_cpw_at(-4.5)) - 0.28e6).abs() < 1e-6);
        assert!((hertz(p.kappa_cpw_at(5.5)) - 0.37e6).abs() < 1e-6);
        assert!((hertz(p.kappa_cpw_at(6.5)) - 1.08e6).abs() < 1e-6);
        assert!((hertz(p.kappa_cpw_at(9.0)) - 1.08e6).abs() < 1e-6);
    }

    #[test]
    fn lambda_voltage_round_trip() {
        let p = DeviceParams::default();
        let l = angular(1.65e6);
        assert!((p.voltage_for_lambda(l) - 5.5).abs() < 1e-12);
        assert!((p.lambda_at(-5.5) - l).abs() < 1e-6);
    }

    #[test]
    fn defaults_validate() {
        DeviceParams::default().validate().unwrap();
    }
}
