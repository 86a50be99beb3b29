use nanoqed::lindblad::{
    boltzmann_factor, collapse_operators, liouvillian, rates_from_measured, steady_state, BathSpec, MeasuredDecay,
    SectorSolver,
};
use nanoqed::hamiltonian::{system_hamiltonian, SystemParams};
use nanoqed::opalg::{annihilation, embed, HilbertLayout, CAVITY};
use nanoqed::spectroscopy::OperatingModel;
use nanoqed::transmon::spectrum_at_flux;
use nanoqed::units::angular;
use nanoqed::DeviceParams;

fn measured() -> MeasuredDecay {
    MeasuredDecay {
        t1: 15e-6,
        t2_star: 1.4e-6,
        kappa_cpw: angular(1.08e6),
        kappa_nr: angular(23e6),
        gamma12_ratio: 2.0,
        dephasing2_ratio: 2.0,
    }
}

#[test]
fn rates_sum_to_measured_and_obey_detailed_balance() {
    let sp = spectrum_at_flux(&Default::default(), 0.33, 3).unwrap();
    let bath = BathSpec { transmon: 0.06, cavity: 0.045, nanoresonator: 0.15 };
    let r = rates_from_measured(&measured(), &bath, &sp, angular(4.94e9), angular(3.47e9)).unwrap();
    assert!(((r.gamma01_down + r.gamma01_up) * 15e-6 - 1.0).abs() < 1e-12);
    let ratio = boltzmann_factor(sp.omega01(), 0.06);
    assert!((r.gamma01_up / r.gamma01_down / ratio - 1.0).abs() < 1e-12);
    assert!((r.kappa_nr_up / r.kappa_nr_down / boltzmann_factor(angular(3.47e9), 0.15) - 1.0).abs() < 1e-12);
    assert!((1.0 / 1.4e-6 - 0.5 / 15e-6 - r.dephasing1).abs() < 1e-6);
}

#[test]
fn cold_undriven_system_sits_in_its_ground_state() {
    let layout = HilbertLayout::hybrid(3, 3, 3).unwrap();
    let sp = spectrum_at_flux(&Default::default(), 0.336, 3).unwrap();
    let sys = SystemParams::from_spectrum(&sp, angular(4.94e9), angular(3.47e9), angular(120e6), None, angular(2e6));
    let h = system_hamiltonian(&sp, &sys, &layout).unwrap();
    let rates = rates_from_measured(&measured(), &BathSpec::zero(), &sp, angular(4.94e9), angular(3.47e9)).unwrap();
    let ss = steady_state(&liouvillian(&h, &collapse_operators(&rates, &layout).unwrap()).unwrap()).unwrap();
    assert!((ss.rho.get(0, 0).re - 1.0).abs() < 1e-8);
}

#[test]
fn sector_solver_agrees_with_dense_lu() {
    let dev = DeviceParams { dims: [3, 3, 3], ..Default::default() };
    let model = OperatingModel::new(&dev, 0.336, angular(1.95e6), 0.18).unwrap();
    let probe = dev.cavity_freq + angular(9.5e6);
    let a = model.solver().solve_sectors(probe, model.drive_amplitude()).unwrap();
    let b = model.solver().dense_steady_state(probe, model.drive_amplitude()).unwrap();
    assert!(a.rho.max_abs_diff(&b.rho) < 1e-10);
}

#[test]
fn photon_number_grows_with_drive() {
    let dev = DeviceParams::default();
    let model = OperatingModel::new(&dev, 0.30, angular(1.35e6), 0.03).unwrap();
    let layout = dev.layout().unwrap();
    let a = embed(&annihilation(4).unwrap(), CAVITY, &layout).unwrap();
    let n_op = &a.adjoint() * &a;
    let probe = dev.cavity_freq + angular(3e6);
    let mut last = -1.0;
    for k in 0..5 {
        let amp = model.drive_amplitude() * 0.5 * k as f64;
        let ss = model.steady_state(probe, amp).unwrap();
        let n = ss.expectation(&n_op).unwrap().re;
        assert!(n >= last - 1e-12);
        last = n;
    }
}

#[test]
fn sector_solver_rejects_non_conserving_hamiltonian() {
    let layout = HilbertLayout::hybrid(2, 2, 2).unwrap();
    let a = embed(&annihilation(2).unwrap(), CAVITY, &layout).unwrap();
    let x = &a + &a.adjoint();
    assert!(SectorSolver::new(&x, &[], &x, 1.0).is_err());
}
