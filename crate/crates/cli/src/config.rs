//! Run configuration. Plain frequencies are in Hz and converted to angular
//! frequency when handed to the library.

use std::path::{Path, PathBuf};

use nanoqed::device::{BeamSpec, CircuitNetwork, ThermalStage};
use nanoqed::transmon::TransmonParams;
use nanoqed::units::{angular, Tolerances};
use nanoqed::DeviceParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaKnot {
    pub voltage_v: f64,
    pub kappa_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceConfig {
    pub charging_energy_hz: f64,
    pub josephson_energy_max_hz: f64,
    pub n_charge_states: usize,
    pub offset_charge: f64,
    /// Truncations (transmon, cavity, nanoresonator).
    pub dims: [usize; 3],
    pub cavity_freq_hz: f64,
    pub nr_freq_hz: f64,
    pub g01_hz: f64,
    /// `null` scales g_12 from g_01 by the charge matrix elements.
    pub g12_hz: Option<f64>,
    pub lambda_per_volt_hz: f64,
    pub t1_s: f64,
    pub t2_star_s: f64,
    pub kappa_nr_hz: f64,
    pub kappa_cpw_schedule: Vec<KappaKnot>,
    pub gamma12_ratio: f64,
    pub dephasing2_ratio: f64,
    pub transmon_temperature_k: f64,
    pub cavity_temperature_k: f64,
    pub drive_photons: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            charging_energy_hz: 0.227e9,
            josephson_energy_max_hz: 15.4e9,
            n_charge_states: 51,
            offset_charge: 0.0,
            dims: [3, 4, 5],
            cavity_freq_hz: 4.94e9,
            nr_freq_hz: 3.47e9,
            g01_hz: 120e6,
            g12_hz: Some(180e6),
            lambda_per_volt_hz: 300e3,
            t1_s: 15e-6,
            t2_star_s: 1.4e-6,
            kappa_nr_hz: 23e6,
            kappa_cpw_schedule: [(0.0, 0.28e6), (4.5, 0.28e6), (5.5, 0.37e6), (6.5, 1.08e6)]
                .iter()
                .map(|&(voltage_v, kappa_hz)| KappaKnot { voltage_v, kappa_hz })
                .collect(),
            gamma12_ratio: 2.0,
            dephasing2_ratio: 2.0,
            transmon_temperature_k: 0.030,
            cavity_temperature_k: 0.045,
            drive_photons: 0.1,
        }
    }
}

impl DeviceConfig {
    pub fn to_params(&self) -> Result<DeviceParams, CliError> {
        let transmon = TransmonParams::new(
            angular(self.charging_energy_hz),
            angular(self.josephson_energy_max_hz),
            self.n_charge_states,
            self.offset_charge,
        )
        .map_err(|e| CliError::config_field("device", e))?;
        let p = DeviceParams {
            transmon,
            dims: self.dims,
            cavity_freq: angular(self.cavity_freq_hz),
            nr_freq: angular(self.nr_freq_hz),
            g01: angular(self.g01_hz),
            g12: self.g12_hz.map(angular),
            lambda_per_volt: angular(self.lambda_per_volt_hz),
            t1: self.t1_s,
            t2_star: self.t2_star_s,
            kappa_nr: angular(self.kappa_nr_hz),
            kappa_cpw_schedule: self
                .kappa_cpw_schedule
                .iter()
                .map(|k| (k.voltage_v, angular(k.kappa_hz)))
                .collect(),
            gamma12_ratio: self.gamma12_ratio,
            dephasing2_ratio: self.dephasing2_ratio,
            transmon_temperature: self.transmon_temperature_k,
            cavity_temperature: self.cavity_temperature_k,
            drive_photons: self.drive_photons,
        };
        p.validate().map_err(|e| CliError::config_field("device", e))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub flux_min: f64,
    pub flux_max: f64,
    pub points: usize,
    pub levels: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            flux_min: 0.0,
            flux_max: 0.5,
            points: 101,
            levels: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyConfig {
    pub flux: f64,
    pub probe_hz: f64,
    pub voltage_v: f64,
    pub nr_temperature_k: f64,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self {
            flux: 0.336,
            probe_hz: 4.9497e9,
            voltage_v: 6.5,
            nr_temperature_k: 0.180,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub flux_min: f64,
    pub flux_max: f64,
    pub flux_points: usize,
    pub probe_min_hz: f64,
    pub probe_max_hz: f64,
    pub probe_points: usize,
    pub voltage_v: f64,
    pub nr_temperature_k: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            flux_min: 0.286,
            flux_max: 0.386,
            flux_points: 80,
            probe_min_hz: 4.945e9,
            probe_max_hz: 4.957e9,
            probe_points: 60,
            voltage_v: 6.5,
            nr_temperature_k: 0.180,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinewidthConfig {
    /// CSV of `freq_Hz,linewidth_Hz` samples; `null` uses the bundled dataset.
    pub data: Option<PathBuf>,
    /// Bias at which the data were taken, for the per-volt coupling.
    pub voltage_v: f64,
    /// Parameters of the synthetic Monte-Carlo study (`trials` > 0 enables it).
    pub trials: usize,
    pub nr_freq_hz: f64,
    pub kappa_nr_hz: f64,
    pub lambda_hz: f64,
    /// `null` takes γ0 = 1/T2* from the device record.
    pub gamma0_hz: Option<f64>,
    pub span_hz: f64,
    pub points: usize,
    pub noise: f64,
}

impl Default for LinewidthConfig {
    fn default() -> Self {
        Self {
            data: None,
            voltage_v: 5.0,
            trials: 0,
            nr_freq_hz: 3.47e9,
            kappa_nr_hz: 24e6,
            lambda_hz: 1.5e6,
            gamma0_hz: None,
            span_hz: 120e6,
            points: 41,
            noise: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmittanceConfig {
    pub network: CircuitNetwork,
    pub freq_min_hz: f64,
    pub freq_max_hz: f64,
    pub points: usize,
    /// Adds the NR branch calibrated to `nr_quality` and `lambda_hz`.
    pub include_nr: bool,
    pub nr_quality: f64,
    pub lambda_hz: f64,
    /// Background dephasing time for the linewidth column; `null` omits it.
    pub t_phi_s: Option<f64>,
}

impl Default for AdmittanceConfig {
    fn default() -> Self {
        Self {
            network: CircuitNetwork::default(),
            freq_min_hz: 1.0e9,
            freq_max_hz: 6.0e9,
            points: 501,
            include_nr: true,
            nr_quality: 150.0,
            lambda_hz: 1.5e6,
            t_phi_s: Some(1.5e-6),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    pub beam: BeamSpec,
    /// dC_NR/dx (F/m).
    pub dc_dx: f64,
    /// C_NR (F) and gap d (m) for the rough estimate.
    pub c_nr: f64,
    pub gap_m: f64,
    pub voltage_v: f64,
    /// x_zp used for the coupling chain (m); `null` uses the computed value.
    pub x_zp_m: Option<f64>,
    pub a01: f64,
    pub sigma: f64,
    pub omega01_hz: f64,
    pub input_chain: Vec<ThermalStage>,
    pub amp_temperature_k: f64,
    pub isolation_db: f64,
    pub base_temperature_k: f64,
    /// Peak linewidth excess and NR width for the coupling extraction (Hz).
    pub peak_excess_hz: f64,
    pub peak_kappa_hz: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            beam: BeamSpec::default(),
            dc_dx: 1.4e-9,
            c_nr: 1.4e-9 * 35e-9,
            gap_m: 35e-9,
            voltage_v: 1.0,
            x_zp_m: Some(25e-15),
            a01: 110.0,
            sigma: 1.85,
            omega01_hz: 3.4e9,
            input_chain: ThermalStage::input_chain(),
            amp_temperature_k: 4.0,
            isolation_db: 35.0,
            base_temperature_k: 0.030,
            peak_excess_hz: 280e3,
            peak_kappa_hz: 24e6,
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceConfig,
    pub spectrum: SpectrumConfig,
    pub steady: SteadyConfig,
    pub sweep: SweepConfig,
    pub linewidth: LinewidthConfig,
    pub admittance: AdmittanceConfig,
    pub estimate: EstimateConfig,
    pub seed: u64,
    /// Worker threads; `null` uses every available core.
    pub threads: Option<usize>,
    pub tolerances: Tolerances,
}

fn require(ok: bool, field: &str, constraint: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config {
            field: field.to_string(),
            message: constraint.to_string(),
        })
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
            field: field_from_serde(&e.to_string()),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.device.to_params()?;
        let s = &self.spectrum;
        require(s.points >= 1, "spectrum.points", "must be at least 1")?;
        require((1..=5).contains(&s.levels), "spectrum.levels", "must lie in 1..=5")?;
        require(s.flux_min <= s.flux_max, "spectrum.flux_min", "must not exceed flux_max")?;
        let w = &self.sweep;
        require(w.flux_points >= 1 && w.probe_points >= 1, "sweep.flux_points", "axes need at least one point")?;
        require(w.flux_points == 1 || w.flux_min < w.flux_max, "sweep.flux_min", "must be below flux_max")?;
        require(w.probe_points == 1 || w.probe_min_hz < w.probe_max_hz, "sweep.probe_min_hz", "must be below probe_max_hz")?;
        require(w.probe_min_hz > 0.0, "sweep.probe_min_hz", "must be positive")?;
        require(w.nr_temperature_k >= 0.0, "sweep.nr_temperature_k", "must be nonnegative")?;
        require(self.steady.probe_hz > 0.0, "steady.probe_hz", "must be positive")?;
        require(self.steady.nr_temperature_k >= 0.0, "steady.nr_temperature_k", "must be nonnegative")?;
        let l = &self.linewidth;
        require(l.points >= 8, "linewidth.points", "must be at least 8")?;
        require(l.noise >= 0.0, "linewidth.noise", "must be nonnegative")?;
        require(l.kappa_nr_hz > 0.0 && l.nr_freq_hz > 0.0, "linewidth.kappa_nr_hz", "frequencies must be positive")?;
        require(l.span_hz > 0.0, "linewidth.span_hz", "must be positive")?;
        require(l.voltage_v != 0.0, "linewidth.voltage_v", "must be nonzero")?;
        let a = &self.admittance;
        a.network.validate().map_err(|e| CliError::config_field("admittance.network", e))?;
        require(a.points >= 1, "admittance.points", "must be at least 1")?;
        require(a.freq_min_hz > 0.0 && a.freq_min_hz <= a.freq_max_hz, "admittance.freq_min_hz", "must be positive and at most freq_max_hz")?;
        require(!a.include_nr || (a.nr_quality > 0.0 && a.lambda_hz > 0.0), "admittance.lambda_hz", "NR branch needs positive quality and coupling")?;
        self.estimate.beam.validate().map_err(|e| CliError::config_field("estimate.beam", e))?;
        require(self.threads != Some(0), "threads", "must be at least 1")?;
        let t = &self.tolerances;
        require(
            t.hermiticity > 0.0 && t.trace_preservation > 0.0 && t.steady_state_residual > 0.0,
            "tolerances",
            "must be positive",
        )?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON of everything that affects results.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.threads = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Best-effort field name from a serde error message.
fn field_from_serde(msg: &str) -> String {
    for marker in ["unknown field `", "missing field `"] {
        if let Some(i) = msg.find(marker) {
            let rest = &msg[i + marker.len()..];
            if let Some(j) = rest.find('`') {
                return rest[..j].to_string();
            }
        }
    }
    "<document>".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_key_is_named() {
        match RunConfig::from_json(r#"{"device": {"bogus": 1}}"#) {
            Err(CliError::Config { field, .. }) => assert_eq!(field, "bogus"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_charging_energy_is_named() {
        let err = RunConfig::from_json(r#"{"device": {"charging_energy_hz": -1}}"#).unwrap_err();
        assert!(err.to_string().contains("charging_energy"), "{err}");
    }

    #[test]
    fn hash_ignores_thread_count() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.threads = Some(3);
        assert_eq!(a.hash(), b.hash());
    }
}
