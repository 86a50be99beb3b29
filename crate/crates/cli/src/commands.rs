//! Subcommand bodies.

use nanoqed::device::{
    attenuated_population, beam_frequency, cavity_mode_temperature, coupling_approx, coupling_strength,
    effective_mass, nr_branch_for_coupling, output_population, qubit_temperature_bound, zero_point,
};
use nanoqed::spectroscopy::{
    coupling_from_peak, fit_linewidth, lorentzian_linewidth, sweep, synthetic_linewidth, FitOptions, LinewidthModel,
    OperatingModel, SweepGrid,
};
use nanoqed::transmon::spectrum_at_flux;
use nanoqed::units::{angular, hertz};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::Artifacts;
use crate::CliError;

const BUNDLED_LINEWIDTH: &str = include_str!("../data/linewidth_synthetic.csv");

fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect()
}

pub fn estimate(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let e = &cfg.estimate;
    let dev = cfg.device.to_params()?;
    let omega_nr = dev.nr_freq;
    let f1 = beam_frequency(&e.beam, 1)?;
    let f3 = beam_frequency(&e.beam, 3)?;
    let m1 = effective_mass(&e.beam, 1)?;
    let m3 = effective_mass(&e.beam, 3)?;
    let x_zp_computed = zero_point(m3, omega_nr)?;
    let x_zp = e.x_zp_m.unwrap_or(x_zp_computed);
    let lambda = coupling_strength(dev.transmon.charging_energy, e.dc_dx, e.voltage_v, x_zp);
    let lambda_approx = coupling_approx(dev.transmon.charging_energy, e.c_nr, e.gap_m, e.voltage_v, x_zp)?;
    let t_q = qubit_temperature_bound(e.a01, e.sigma, angular(e.omega01_hz))?;
    let n_in = attenuated_population(&e.input_chain, dev.cavity_freq)?;
    let n_out = output_population(e.amp_temperature_k, e.isolation_db, e.base_temperature_k, dev.cavity_freq)?;
    let (n_cpw, t_cpw) = cavity_mode_temperature(n_in, n_out, dev.cavity_freq)?;
    let lambda_peak = coupling_from_peak(angular(e.peak_excess_hz), 0.0, angular(e.peak_kappa_hz))?;

    let report = json!({
        "inputs": e,
        "beam": {
            "f1_Hz": f1,
            "f3_Hz": f3,
            "mass1_kg": m1,
            "mass3_kg": m3,
            "x_zp3_m": x_zp_computed,
        },
        "coupling": {
            "x_zp_used_m": x_zp,
            "lambda_over_2pi_Hz": hertz(lambda),
            "lambda_approx_over_2pi_Hz": hertz(lambda_approx),
        },
        "qubit_temperature_bound_K": t_q,
        "thermal": {
            "n_in": n_in,
            "n_out": n_out,
            "n_cpw": n_cpw,
            "t_cpw_K": t_cpw,
        },
        "peak_extraction": {
            "lambda_over_h_Hz": hertz(lambda_peak),
            "lambda_over_h_per_volt_Hz_per_V": hertz(lambda_peak) / cfg.linewidth.voltage_v.abs(),
        },
    });
    println!("beam          f1 = {:.4} MHz   f3 = {:.4} GHz", f1 / 1e6, f3 / 1e9);
    println!("              m3 = {:.4} fg    x_zp(m3, ω_NR) = {:.3} fm", m3 * 1e18, x_zp_computed * 1e15);
    println!(
        "coupling      λ/2π = {:.2} kHz   rough λ/2π = {:.2} kHz   (V = {} V, x_zp = {:.2} fm)",
        hertz(lambda).abs() / 1e3,
        hertz(lambda_approx).abs() / 1e3,
        e.voltage_v,
        x_zp * 1e15
    );
    println!("qubit         T_Q < {:.2} mK", t_q * 1e3);
    println!("thermal       n_in = {n_in:.5}   n_out = {n_out:.5}   n_cpw = {n_cpw:.5}   T_cpw = {:.2} mK", t_cpw * 1e3);
    println!("peak          λ/h = {:.4} MHz", hertz(lambda_peak) / 1e6);
    out.json("estimate.json", &report)
}

pub fn transmon_spectrum(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let s = &cfg.spectrum;
    let dev = cfg.device.to_params()?;
    let fluxes = axis(s.flux_min, s.flux_max, s.points);
    let rows = fluxes
        .par_iter()
        .map(|&flux| {
            let sp = spectrum_at_flux(&dev.transmon, flux, s.levels)?;
            let mut row = vec![flux, dev.transmon.ej_over_ec(flux)];
            row.extend(sp.levels.iter().skip(1).map(|&w| hertz(w)));
            Ok(row)
        })
        .collect::<Result<Vec<_>, nanoqed::Error>>()?;
    let mut header = vec!["flux_Phi0".to_string(), "ej_over_ec_ratio".to_string()];
    header.extend((1..s.levels).map(|m| format!("f0{m}_Hz")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("spectrum.csv", &header, &rows)
}

pub fn steady(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let s = &cfg.steady;
    let dev = cfg.device.to_params()?;
    let lambda = dev.lambda_at(s.voltage_v);
    let model = OperatingModel::new(&dev, s.flux, lambda, s.nr_temperature_k)?;
    let probe = angular(s.probe_hz);
    let ss = model.steady_state(probe, model.drive_amplitude())?;
    let a = ss.cavity_amplitude.unwrap_or_default();
    let normalized = a.norm() * 0.5 * model.kappa_cpw() / model.drive_amplitude();
    // Weak-probe check: the normalized response should not depend on the drive.
    let half = model.respond_with(probe, 0.5 * model.drive_amplitude())?;
    let report = json!({
        "flux_Phi0": s.flux,
        "probe_Hz": s.probe_hz,
        "voltage_V": s.voltage_v,
        "lambda_over_2pi_Hz": hertz(lambda),
        "kappa_cpw_over_2pi_Hz": hertz(model.kappa_cpw()),
        "drive_amplitude_over_2pi_Hz": hertz(model.drive_amplitude()),
        "f01_Hz": hertz(model.spectrum().omega01()),
        "rates_per_s": model.rates(),
        "populations": {
            "transmon": ss.populations_of("transmon"),
            "cavity": ss.populations_of("cavity"),
            "nanoresonator": ss.populations_of("nanoresonator"),
        },
        "cavity_amplitude": { "re": a.re, "im": a.im, "abs": a.norm(), "arg_rad": a.arg() },
        "normalized_amplitude": normalized,
        "half_drive_normalized_amplitude": half.normalized,
        "linearity_deviation": (half.normalized / normalized - 1.0).abs(),
        "residual": ss.residual,
        "relative_residual": ss.relative_residual,
        "within_tolerance": ss.relative_residual <= cfg.tolerances.steady_state_residual,
        "min_eigenvalue": ss.min_eigenvalue(),
        "method": format!("{:?}", ss.method),
    });
    out.json("steady.json", &report)
}

pub fn sweep_map(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let w = &cfg.sweep;
    let dev = cfg.device.to_params()?;
    let grid = SweepGrid {
        flux_axis: axis(w.flux_min, w.flux_max, w.flux_points),
        probe_axis: axis(w.probe_min_hz, w.probe_max_hz, w.probe_points)
            .into_iter()
            .map(angular)
            .collect(),
        voltage: w.voltage_v,
        lambda_per_volt: dev.lambda_per_volt,
        nr_temperature: w.nr_temperature_k,
    };
    let map = sweep(&dev, &grid)?;
    let mut rows = Vec::with_capacity(map.amplitude.len());
    for (i, &flux) in grid.flux_axis.iter().enumerate() {
        for (j, &probe) in grid.probe_axis.iter().enumerate() {
            let k = map.index(i, j);
            let mut row = vec![flux, hertz(probe), map.amplitude[k], map.normalized[k], map.phase[k]];
            row.extend(map.populations[k].iter().copied());
            row.push(map.residuals[k]);
            rows.push(row);
        }
    }
    let mut header = vec![
        "flux_Phi0".to_string(),
        "probe_freq_Hz".to_string(),
        "amplitude_sqrt_photons".to_string(),
        "normalized_amplitude_ratio".to_string(),
        "phase_rad".to_string(),
    ];
    header.extend((0..dev.dims[0]).map(|m| format!("p{m}_prob")));
    header.push("residual_rel".to_string());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("sweep.csv", &header, &rows)?;

    let over = map
        .residuals
        .iter()
        .filter(|r| r.is_nan() || **r > cfg.tolerances.steady_state_residual)
        .count();
    let peaks: Vec<_> = grid
        .flux_axis
        .iter()
        .zip(map.row_peaks())
        .map(|(f, p)| json!({ "flux_Phi0": f, "peak_normalized": p }))
        .collect();
    let report = json!({
        "shape": [grid.flux_axis.len(), grid.probe_axis.len()],
        "lambda_over_2pi_Hz": hertz(grid.lambda()),
        "kappa_cpw_over_2pi_Hz": hertz(map.kappa_cpw),
        "drive_amplitude_over_2pi_Hz": hertz(map.drive_amplitude),
        "nr_temperature_K": grid.nr_temperature,
        "max_residual": map.max_residual(),
        "cells_over_tolerance": over,
        "failures": map.failures.iter().map(|(i, j, m)| json!({"flux_index": i, "probe_index": j, "message": m})).collect::<Vec<_>>(),
        "row_peaks": peaks,
    });
    out.json("sweep.json", &report)
}

fn read_linewidth_data(text: &str, source: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Io {
            path: source.to_string(),
            message: e.to_string(),
        })?;
        let parse = |k: usize| -> Result<f64, CliError> {
            rec.get(k).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| CliError::Io {
                path: source.to_string(),
                message: format!("row {:?}: expected two numeric columns freq_Hz,linewidth_Hz", rec),
            })
        };
        out.push((angular(parse(0)?), angular(parse(1)?)));
    }
    Ok(out)
}

pub fn linewidth(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let l = &cfg.linewidth;
    let (text, source) = match &l.data {
        Some(p) => (
            std::fs::read_to_string(p).map_err(|e| CliError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?,
            p.display().to_string(),
        ),
        None => (BUNDLED_LINEWIDTH.to_string(), "<bundled>".to_string()),
    };
    let data = read_linewidth_data(&text, &source)?;
    let fit = fit_linewidth(&data, &FitOptions::default())?;
    let m = fit.model;
    let rows: Vec<Vec<f64>> = data
        .iter()
        .map(|&(w, g)| vec![hertz(w), hertz(g), hertz(lorentzian_linewidth(&m, w))])
        .collect();
    out.csv("linewidth_curve.csv", &["freq_Hz", "linewidth_data_Hz", "linewidth_fit_Hz"], &rows)?;

    let mut report = json!({
        "source": source,
        "samples": data.len(),
        "fit": {
            "f_nr_Hz": hertz(m.nr_freq),
            "kappa_nr_over_2pi_Hz": hertz(m.kappa_nr),
            "quality_factor": m.quality_factor(),
            "lambda_over_h_Hz": hertz(m.lambda),
            "lambda_over_h_per_volt_Hz_per_V": hertz(m.lambda) / l.voltage_v.abs(),
            "gamma0_over_2pi_Hz": hertz(m.gamma0),
            "peak_excess_over_2pi_Hz": hertz(fit.amplitude),
            "residual_norm": fit.residual_norm,
            "iterations": fit.iterations,
        },
    });

    if l.trials > 0 {
        let dev = cfg.device.to_params()?;
        let truth = LinewidthModel {
            lambda: angular(l.lambda_hz),
            nr_freq: angular(l.nr_freq_hz),
            kappa_nr: angular(l.kappa_nr_hz),
            n_th: 0.0,
            gamma0: l.gamma0_hz.map_or(1.0 / dev.t2_star, angular),
        };
        let omegas: Vec<f64> = axis(l.nr_freq_hz - 0.5 * l.span_hz, l.nr_freq_hz + 0.5 * l.span_hz, l.points)
            .into_iter()
            .map(angular)
            .collect();
        let trials = (0..l.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(t));
                let data = synthetic_linewidth(&truth, &omegas, l.noise, &mut rng)?;
                Ok(fit_linewidth(&data, &FitOptions::default()).ok().map(|f| f.model))
            })
            .collect::<Result<Vec<_>, nanoqed::Error>>()?;
        let mut rows = Vec::new();
        let mut passed = 0;
        for (t, fit) in trials.iter().enumerate() {
            let row = match fit {
                Some(f) => {
                    let ok = (f.nr_freq / truth.nr_freq - 1.0).abs() <= 0.005
                        && (f.kappa_nr / truth.kappa_nr - 1.0).abs() <= 0.10;
                    passed += ok as usize;
                    vec![t as f64, hertz(f.nr_freq), hertz(f.kappa_nr), hertz(f.lambda), hertz(f.gamma0), ok as u8 as f64]
                }
                None => vec![t as f64, f64::NAN, f64::NAN, f64::NAN, f64::NAN, 0.0],
            };
            rows.push(row);
        }
        out.csv(
            "linewidth_trials.csv",
            &["trial_index", "f_nr_Hz", "kappa_nr_Hz", "lambda_over_h_Hz", "gamma0_Hz", "within_bounds_flag"],
            &rows,
        )?;
        report["monte_carlo"] = json!({
            "trials": l.trials,
            "noise": l.noise,
            "within_bounds": passed,
            "fraction": passed as f64 / l.trials as f64,
        });
    }
    out.json("linewidth.json", &report)
}

pub fn admittance(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let a = &cfg.admittance;
    let dev = cfg.device.to_params()?;
    let mut net = a.network.clone();
    if a.include_nr {
        net.nr_branch = Some(nr_branch_for_coupling(
            dev.nr_freq,
            a.nr_quality,
            angular(a.lambda_hz),
            net.shunt_capacitance,
        )?);
    }
    let omegas: Vec<f64> = axis(a.freq_min_hz, a.freq_max_hz, a.points).into_iter().map(angular).collect();
    let rows: Vec<Vec<f64>> = net
        .curve(&omegas, a.t_phi_s)
        .iter()
        .map(|s| {
            vec![
                hertz(s.omega),
                s.admittance.re,
                s.admittance.im,
                s.t1.unwrap_or(f64::NAN),
                s.linewidth.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    out.csv(
        "admittance.csv",
        &["freq_Hz", "re_Y_S", "im_Y_S", "t1_s", "linewidth_Hz"],
        &rows,
    )
}
