use nanoqed::spectroscopy::{
    fit_linewidth, lorentzian_linewidth, noise_linewidth, single_tone_point, sweep, sx_noise, FitOptions,
    LinewidthModel, NoiseSign, SweepGrid,
};
use nanoqed::lindblad::boltzmann_factor;
use nanoqed::units::angular;
use nanoqed::DeviceParams;
use proptest::prelude::*;

fn model(n_th: f64) -> LinewidthModel {
    LinewidthModel {
        lambda: angular(1.5e6),
        nr_freq: angular(3.47e9),
        kappa_nr: angular(24e6),
        n_th,
        gamma0: angular(110e3),
    }
}

#[test]
fn sweep_cells_match_isolated_points() {
    let dev = DeviceParams::default();
    let flux = vec![0.30, 0.336];
    let probe = vec![dev.cavity_freq + angular(6e6), dev.cavity_freq + angular(9.7e6), dev.cavity_freq + angular(12e6)];
    let lambda = angular(1.65e6);
    let grid = SweepGrid::at_coupling(&dev, flux.clone(), probe.clone(), lambda, 0.10);
    let map = sweep(&dev, &grid).unwrap();
    assert!(map.failures.is_empty());
    for (i, &f) in flux.iter().enumerate() {
        for (j, &w) in probe.iter().enumerate() {
            let k = map.index(i, j);
            let point = single_tone_point(&dev, f, w, grid.lambda(), 0.10).unwrap();
            assert_eq!(point.normalized.to_bits(), map.normalized[k].to_bits());
            assert!((map.populations[k].iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(map.residuals[k] < 1e-8);
        }
    }
}

#[test]
fn far_detuned_cavity_transmits_fully_on_resonance() {
    let dev = DeviceParams { g01: 0.0, g12: Some(0.0), ..Default::default() };
    let m = nanoqed::spectroscopy::OperatingModel::new(&dev, 0.2, angular(1.35e6), 0.03).unwrap();
    let r = m.respond_with(dev.cavity_freq, 0.01 * m.drive_amplitude()).unwrap();
    // Thermal gain narrows the net damping to κ(1 − e^{−ħω/kT}).
    let net = 1.0 - boltzmann_factor(dev.cavity_freq, dev.cavity_temperature);
    assert!((r.normalized * net - 1.0).abs() < 1e-4, "{}", r.normalized);
}

#[test]
fn noise_fit_is_a_fixed_point() {
    let truth = model(0.0);
    let data: Vec<(f64, f64)> = (0..41)
        .map(|k| angular(3.41e9 + 3e6 * k as f64))
        .map(|w| (w, noise_linewidth(&truth, w)))
        .collect();
    let fit = fit_linewidth(&data, &FitOptions::default()).unwrap().model;
    for (got, want) in [
        (fit.nr_freq, truth.nr_freq),
        (fit.kappa_nr, truth.kappa_nr),
        (fit.lambda, truth.lambda),
        (fit.gamma0, truth.gamma0),
    ] {
        assert!((got / want - 1.0).abs() < 1e-3, "{got} vs {want}");
    }
}

proptest! {
    #[test]
    fn linewidth_never_drops_below_background(f in 3.0e9f64..4.0e9, n_th in 0.0f64..3.0) {
        let m = model(n_th);
        prop_assert!(noise_linewidth(&m, angular(f)) >= m.gamma0);
        prop_assert!(lorentzian_linewidth(&m, angular(f)) >= m.gamma0);
    }

    #[test]
    fn noise_detailed_balance_identity(f in 3.2e9f64..3.8e9, n_th in 0.01f64..3.0) {
        let m = model(n_th);
        let w = angular(f);
        let q = (0.5 * m.kappa_nr).powi(2);
        let lhs = sx_noise(&m, w, NoiseSign::Positive) * n_th;
        let rhs = sx_noise(&m, w, NoiseSign::Negative) * (n_th + 1.0)
            * ((m.nr_freq + w).powi(2) + q) / ((m.nr_freq - w).powi(2) + q);
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }
}
