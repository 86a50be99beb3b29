//! Single-tone transmission sweeps and the nanoresonator linewidth model.

mod fit;
mod noise;

pub use fit::{fit_linewidth, FitOptions, LinewidthFit};
pub use noise::{
    coupling_from_peak, noise_linewidth, lorentzian_linewidth, sx_noise, synthetic_linewidth, LinewidthModel,
    NoiseSign,
};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{bare_hamiltonian, coupling_hamiltonians, drive_hamiltonian, rotating_frame, SystemParams};
use crate::lindblad::{collapse_operators, rates_from_measured, Collapse, RateSet, SectorSolver, SteadyState};
use crate::opalg::{annihilation, embed, CAVITY, TRANSMON};
use crate::params::DeviceParams;
use crate::transmon::{spectrum_at_flux, TransmonSpectrum};
use crate::units::BOLTZMANN;

/// The undriven open system at one flux and coupling, ready to be probed.
#[derive(Debug)]
pub struct OperatingModel {
    flux: f64,
    lambda: f64,
    kappa_cpw: f64,
    drive_amplitude: f64,
    spectrum: TransmonSpectrum,
    rates: RateSet,
    collapses: Vec<Collapse>,
    solver: SectorSolver,
}

impl OperatingModel {
    /// Builds the model at flux `flux` (units of Φ0) with transmon–NR coupling
    /// `lambda` (rad/s) and NR bath temperature `nr_temperature` (K).
    ///
    /// κ_cpw is read from the device schedule at the bias voltage that
    /// produces `lambda`.
    pub fn new(device: &DeviceParams, flux: f64, lambda: f64, nr_temperature: f64) -> Result<Self> {
        device.validate()?;
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", "must be nonnegative"));
        }
        let voltage = if lambda == 0.0 {
            0.0
        } else if device.lambda_per_volt > 0.0 {
            device.voltage_for_lambda(lambda)
        } else {
            return Err(Error::param("lambda_per_volt", "must be positive for a nonzero coupling"));
        };
        let kappa_cpw = device.kappa_cpw_at(voltage);
        let layout = device.layout()?;
        let spectrum = spectrum_at_flux(&device.transmon, flux, device.dims[TRANSMON])?;

        let g12 = if spectrum.n_levels() > 2 { device.g12 } else { None };
        let sys = SystemParams::from_spectrum(&spectrum, device.cavity_freq, device.nr_freq, device.g01, g12, lambda);
        let bare = bare_hamiltonian(&spectrum, &sys, &layout)?;
        let (hg, hl) = coupling_hamiltonians(&spectrum, &sys, &layout)?;
        let idle = drive_hamiltonian(&sys, &layout)?;
        let h0 = rotating_frame(&bare, &[&hg, &hl], &idle, device.cavity_freq)?;

        let rates = rates_from_measured(
            &device.measured(kappa_cpw),
            &device.bath(nr_temperature),
            &spectrum,
            device.cavity_freq,
            device.nr_freq,
        )?;
        let collapses = collapse_operators(&rates, &layout)?;
        let a = embed(&annihilation(device.dims[CAVITY])?, CAVITY, &layout)?;
        let x = &a + &a.adjoint();
        let solver = SectorSolver::new(&h0, &collapses, &x, device.cavity_freq)?;

        Ok(Self {
            flux,
            lambda,
            kappa_cpw,
            drive_amplitude: device.drive_amplitude(kappa_cpw),
            spectrum,
            rates,
            collapses,
            solver,
        })
    }

    pub fn flux(&self) -> f64 {
        self.flux
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kappa_cpw(&self) -> f64 {
        self.kappa_cpw
    }

    /// Default probe amplitude E_d (rad/s).
    pub fn drive_amplitude(&self) -> f64 {
        self.drive_amplitude
    }

    pub fn spectrum(&self) -> &TransmonSpectrum {
        &self.spectrum
    }

    pub fn rates(&self) -> &RateSet {
        &self.rates
    }

    pub fn collapses(&self) -> &[Collapse] {
        &self.collapses
    }

    pub fn solver(&self) -> &SectorSolver {
        &self.solver
    }

    /// Full steady state under a probe at `probe` (rad/s) with amplitude `amplitude`.
    pub fn steady_state(&self, probe: f64, amplitude: f64) -> Result<SteadyState> {
        self.solver.solve(probe, amplitude).map_err(|e| Error::AtGridPoint {
            flux: self.flux,
            probe,
            source: Box::new(e),
        })
    }

    /// Response to a probe at `probe` with the default amplitude.
    pub fn respond(&self, probe: f64) -> Result<ToneResponse> {
        self.respond_with(probe, self.drive_amplitude)
    }

    pub fn respond_with(&self, probe: f64, amplitude: f64) -> Result<ToneResponse> {
        let ss = self.steady_state(probe, amplitude)?;
        let a = ss.cavity_amplitude.unwrap_or_default();
        let normalized = if amplitude > 0.0 {
            a.norm() * 0.5 * self.kappa_cpw / amplitude
        } else {
            0.0
        };
        Ok(ToneResponse {
            amplitude: a,
            normalized,
            populations: ss.populations[TRANSMON].clone(),
            residual: ss.relative_residual,
        })
    }
}

/// Observables of one steady state under a single probe tone.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneResponse {
    /// ⟨a⟩.
    pub amplitude: C64,
    /// |⟨a⟩|·(κ_cpw/2)/E_d; unity on bare-cavity resonance at weak drive.
    pub normalized: f64,
    /// Transmon level populations.
    pub populations: Vec<f64>,
    /// Relative residual of the steady state.
    pub residual: f64,
}

/// Steady-state response at one (flux, probe) point.
pub fn single_tone_point(
    device: &DeviceParams,
    flux: f64,
    probe: f64,
    lambda: f64,
    nr_temperature: f64,
) -> Result<ToneResponse> {
    let at = |e: Error| match e {
        e @ Error::AtGridPoint { .. } => e,
        e => Error::AtGridPoint {
            flux,
            probe,
            source: Box::new(e),
        },
    };
    OperatingModel::new(device, flux, lambda, nr_temperature)
        .map_err(at)?
        .respond(probe)
        .map_err(at)
}

/// Axes and bias of a single-tone map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    /// Flux values (Φ0).
    pub flux_axis: Vec<f64>,
    /// Probe frequencies (rad/s).
    pub probe_axis: Vec<f64>,
    /// NR bias voltage (V).
    pub voltage: f64,
    /// Coupling slope (rad/s per V).
    pub lambda_per_volt: f64,
    /// NR bath temperature (K).
    pub nr_temperature: f64,
}

fn strictly_monotone(axis: &[f64]) -> bool {
    axis.iter().all(|v| v.is_finite())
        && (axis.windows(2).all(|w| w[1] > w[0]) || axis.windows(2).all(|w| w[1] < w[0]))
}

impl SweepGrid {
    /// Grid at the bias producing coupling `lambda` with the device's slope.
    pub fn at_coupling(
        device: &DeviceParams,
        flux_axis: Vec<f64>,
        probe_axis: Vec<f64>,
        lambda: f64,
        nr_temperature: f64,
    ) -> Self {
        Self {
            flux_axis,
            probe_axis,
            voltage: if lambda == 0.0 { 0.0 } else { device.voltage_for_lambda(lambda) },
            lambda_per_volt: device.lambda_per_volt,
            nr_temperature,
        }
    }

    /// λ = λ_per_volt·|V|.
    pub fn lambda(&self) -> f64 {
        self.lambda_per_volt * self.voltage.abs()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.flux_axis.len(), self.probe_axis.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.flux_axis.is_empty() || self.probe_axis.is_empty() {
            return Err(Error::InsufficientData { needed: 1, found: 0 });
        }
        if !strictly_monotone(&self.flux_axis) {
            return Err(Error::param("flux_axis", "must be finite and strictly monotone"));
        }
        if !strictly_monotone(&self.probe_axis) || self.probe_axis.iter().any(|&w| w <= 0.0) {
            return Err(Error::param("probe_axis", "must be positive and strictly monotone"));
        }
        if !self.voltage.is_finite() {
            return Err(Error::param("voltage", "must be finite"));
        }
        if !(self.lambda_per_volt >= 0.0 && self.lambda_per_volt.is_finite()) {
            return Err(Error::param("lambda_per_volt", "must be nonnegative"));
        }
        if !(self.nr_temperature >= 0.0 && self.nr_temperature.is_finite()) {
            return Err(Error::param("nr_temperature", "must be nonnegative"));
        }
        Ok(())
    }
}

/// Steady-state observables over a (flux, probe) grid, stored row-major by flux.
#[derive(Debug, Clone)]
pub struct SpectroscopyMap {
    pub grid: SweepGrid,
    /// κ_cpw used for every cell (rad/s).
    pub kappa_cpw: f64,
    /// Probe amplitude E_d (rad/s).
    pub drive_amplitude: f64,
    pub amplitude: Vec<f64>,
    pub normalized: Vec<f64>,
    pub phase: Vec<f64>,
    /// Transmon populations per cell.
    pub populations: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Cells that failed, as (flux index, probe index, message); their values are NaN.
    pub failures: Vec<(usize, usize, String)>,
}

impl SpectroscopyMap {
    pub fn index(&self, flux: usize, probe: usize) -> usize {
        flux * self.grid.probe_axis.len() + probe
    }

    /// Normalized transmission along one flux row.
    pub fn row(&self, flux: usize) -> &[f64] {
        let n = self.grid.probe_axis.len();
        &self.normalized[flux * n..(flux + 1) * n]
    }

    /// Peak normalized transmission of each flux row.
    ///
    /// Around the sampled maximum, 1/t² of a Lorentzian is a parabola in the
    /// probe frequency; its vertex gives the peak between samples.
    pub fn row_peaks(&self) -> Vec<f64> {
        (0..self.grid.flux_axis.len())
            .map(|i| interpolated_peak(&self.grid.probe_axis, self.row(i)))
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().filter(|r| r.is_finite()).fold(0.0, f64::max)
    }
}

fn interpolated_peak(x: &[f64], t: &[f64]) -> f64 {
    let Some((k, &best)) = t
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
    else {
        return f64::NAN;
    };
    if k == 0 || k + 1 == t.len() || !(t[k - 1] > 0.0 && t[k + 1] > 0.0) {
        return best;
    }
    let (x0, x1, x2) = (x[k - 1], x[k], x[k + 1]);
    let (y0, y1, y2) = (t[k - 1].powi(-2), t[k].powi(-2), t[k + 1].powi(-2));
    // Parabola through the three points in divided-difference form.
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c = (d12 - d01) / (x2 - x0);
    if !(c > 0.0) {
        return best;
    }
    let b = d01 - c * (x0 + x1);
    let vertex = -b / (2.0 * c);
    if vertex < x0.min(x2) || vertex > x0.max(x2) {
        return best;
    }
    let y = y0 + d01 * (vertex - x0) + c * (vertex - x0) * (vertex - x1);
    if y > 0.0 {
        y.sqrt().recip().max(best)
    } else {
        best
    }
}

/// Evaluates the grid. Rows run in parallel; each cell is a pure function
/// of its coordinates, so the result does not depend on scheduling.
pub fn sweep(device: &DeviceParams, grid: &SweepGrid) -> Result<SpectroscopyMap> {
    grid.validate()?;
    let mut device = device.clone();
    device.lambda_per_volt = grid.lambda_per_volt;
    device.validate()?;
    let lambda = grid.lambda();
    let n_levels = device.dims[TRANSMON];
    let kappa_cpw = device.kappa_cpw_at(grid.voltage);
    let drive_amplitude = device.drive_amplitude(kappa_cpw);

    type Cell = std::result::Result<ToneResponse, String>;
    let rows: Vec<Vec<Cell>> = grid
        .flux_axis
        .par_iter()
        .map(|&flux| match OperatingModel::new(&device, flux, lambda, grid.nr_temperature) {
            Ok(model) => grid
                .probe_axis
                .iter()
                .map(|&w| model.respond(w).map_err(|e| e.to_string()))
                .collect(),
            Err(e) => {
                let msg = Error::AtGridPoint {
                    flux,
                    probe: grid.probe_axis[0],
                    source: Box::new(e),
                }
                .to_string();
                vec![Err(msg); grid.probe_axis.len()]
            }
        })
        .collect();

    let cells = grid.flux_axis.len() * grid.probe_axis.len();
    let mut map = SpectroscopyMap {
        grid: grid.clone(),
        kappa_cpw,
        drive_amplitude,
        amplitude: Vec::with_capacity(cells),
        normalized: Vec::with_capacity(cells),
        phase: Vec::with_capacity(cells),
        populations: Vec::with_capacity(cells),
        residuals: Vec::with_capacity(cells),
        failures: Vec::new(),
    };
    for (i, row) in rows.into_iter().enumerate() {
        for (j, cell) in row.into_iter().enumerate() {
            match cell {
                Ok(r) => {
                    map.amplitude.push(r.amplitude.norm());
                    map.normalized.push(r.normalized);
                    map.phase.push(r.amplitude.arg());
                    map.populations.push(r.populations);
                    map.residuals.push(r.residual);
                }
                Err(msg) => {
                    map.amplitude.push(f64::NAN);
                    map.normalized.push(f64::NAN);
                    map.phase.push(f64::NAN);
                    map.populations.push(vec![f64::NAN; n_levels]);
                    map.residuals.push(f64::NAN);
                    map.failures.push((i, j, msg));
                }
            }
        }
    }
    Ok(map)
}

/// Transmon populations along a flux trace, with the two thermal references.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationTrace {
    pub flux: Vec<f64>,
    /// Populations p_m per flux point.
    pub populations: Vec<Vec<f64>>,
    /// Gibbs populations at the transmon bath temperature.
    pub transmon_bath: Vec<Vec<f64>>,
    /// Gibbs populations at the NR bath temperature.
    pub nr_bath: Vec<Vec<f64>>,
}

impl PopulationTrace {
    /// p_m along the trace.
    pub fn level(&self, m: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[m]).collect()
    }
}

/// Gibbs populations of the transmon levels at temperature `t`.
pub fn gibbs_populations(spectrum: &TransmonSpectrum, t: f64) -> Vec<f64> {
    use crate::units::HBAR;
    let w: Vec<f64> = spectrum
        .levels
        .iter()
        .map(|&e| if t > 0.0 { (-HBAR * e / (BOLTZMANN * t)).exp() } else if e == 0.0 { 1.0 } else { 0.0 })
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// Transmon populations versus flux under the default probe at ω_cpw.
pub fn population_trace(
    device: &DeviceParams,
    flux_axis: &[f64],
    lambda: f64,
    nr_temperature: f64,
) -> Result<PopulationTrace> {
    population_trace_with(device, flux_axis, lambda, nr_temperature, Some(device.cavity_freq))
}

/// As [`population_trace`] with an explicit probe; `None` leaves the drive off.
pub fn population_trace_with(
    device: &DeviceParams,
    flux_axis: &[f64],
    lambda: f64,
    nr_temperature: f64,
    probe: Option<f64>,
) -> Result<PopulationTrace> {
    if flux_axis.is_empty() {
        return Err(Error::InsufficientData { needed: 1, found: 0 });
    }
    let points: Vec<Result<[Vec<f64>; 3]>> = flux_axis
        .par_iter()
        .map(|&flux| {
            let model = OperatingModel::new(device, flux, lambda, nr_temperature).map_err(|e| Error::AtGridPoint {
                flux,
                probe: probe.unwrap_or(0.0),
                source: Box::new(e),
            })?;
            let (w, amp) = match probe {
                Some(w) => (w, model.drive_amplitude()),
                None => (device.cavity_freq, 0.0),
            };
            let r = model.respond_with(w, amp)?;
            Ok([
                r.populations,
                gibbs_populations(model.spectrum(), device.transmon_temperature),
                gibbs_populations(model.spectrum(), nr_temperature),
            ])
        })
        .collect();
    let mut trace = PopulationTrace {
        flux: flux_axis.to_vec(),
        populations: Vec::new(),
        transmon_bath: Vec::new(),
        nr_bath: Vec::new(),
    };
    for p in points {
        let [p, tq, tnr] = p?;
        trace.populations.push(p);
        trace.transmon_bath.push(tq);
        trace.nr_bath.push(tnr);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabolic_peak_is_exact_for_lorentzian() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let t: Vec<f64> = x.iter().map(|&w| 1.0 / (1.0 + ((w - 1.37) / 0.4).powi(2)).sqrt()).collect();
        let p = interpolated_peak(&x, &t);
        assert!((p - 1.0).abs() < 1e-12, "{p}");
    }

    #[test]
    fn grid_rejects_non_monotone_axis() {
        let g = SweepGrid {
            flux_axis: vec![0.1, 0.3, 0.2],
            probe_axis: vec![1.0],
            voltage: 0.0,
            lambda_per_volt: 1.0,
            nr_temperature: 0.03,
        };
        assert!(g.validate().is_err());
    }
}
