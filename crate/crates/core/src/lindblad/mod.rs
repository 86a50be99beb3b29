//! Dissipative rates, Liouvillian assembly and steady states of ρ̇ = Lρ.
//!
//! The dense path builds the full D²×D² Liouvillian and solves it with one
//! LU factorization after replacing a population row by the trace condition.
//! [`SectorSolver`] reaches the same state far faster for weakly driven,
//! excitation-conserving models and is what the sweep engine uses.

mod sector;

pub use sector::SectorSolver;

use faer::linalg::solvers::Solve;
use faer::Mat;
use log::debug;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{
    annihilation, embed, expectation, vectorize, devectorize_on, HilbertLayout, QuantumOperator, Superoperator,
    CAVITY, NANORESONATOR, TRANSMON,
};
use crate::transmon::TransmonSpectrum;
use crate::units::{Tolerances, BOLTZMANN, HBAR};

/// Population of a subsystem's top level above which truncation is suspect.
pub const TRUNCATION_WARNING: f64 = 1e-3;

/// Bath temperatures (K).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub transmon: f64,
    pub cavity: f64,
    pub nanoresonator: f64,
}

impl Default for BathSpec {
    fn default() -> Self {
        Self {
            transmon: 0.030,
            cavity: 0.045,
            nanoresonator: 0.030,
        }
    }
}

impl BathSpec {
    pub fn zero() -> Self {
        Self {
            transmon: 0.0,
            cavity: 0.0,
            nanoresonator: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("transmon_temperature", self.transmon),
            ("cavity_temperature", self.cavity),
            ("nanoresonator_temperature", self.nanoresonator),
        ] {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::param(name, "must be a nonnegative temperature"));
            }
        }
        Ok(())
    }
}

/// exp(−ħω/k_BT), zero at T = 0.
pub fn boltzmann_factor(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    (-HBAR * omega / (BOLTZMANN * temperature)).exp()
}

/// Bose–Einstein occupation 1/(exp(ħω/k_BT) − 1), zero at T = 0.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (BOLTZMANN * temperature)).exp_m1()
}

/// Temperature at which a mode of frequency ω holds `n` quanta on average.
pub fn temperature_for_occupation(omega: f64, n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    HBAR * omega / (BOLTZMANN * (1.0 / n).ln_1p())
}

/// Measured decay data feeding [`rates_from_measured`]. Rates in rad/s, times in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredDecay {
    pub t1: f64,
    pub t2_star: f64,
    pub kappa_cpw: f64,
    pub kappa_nr: f64,
    /// Γ12⁻/Γ01⁻.
    pub gamma12_ratio: f64,
    /// γφ2/γφ1.
    pub dephasing2_ratio: f64,
}

/// All dissipative rates (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RateSet {
    pub kappa_cpw_down: f64,
    pub kappa_cpw_up: f64,
    pub kappa_nr_down: f64,
    pub kappa_nr_up: f64,
    pub gamma01_down: f64,
    pub gamma01_up: f64,
    pub gamma12_down: f64,
    pub gamma12_up: f64,
    pub dephasing1: f64,
    pub dephasing2: f64,
}

impl RateSet {
    pub fn all(&self) -> [f64; 10] {
        [
            self.kappa_cpw_down,
            self.kappa_cpw_up,
            self.kappa_nr_down,
            self.kappa_nr_up,
            self.gamma01_down,
            self.gamma01_up,
            self.gamma12_down,
            self.gamma12_up,
            self.dephasing1,
            self.dephasing2,
        ]
    }
}

/// Splits the measured decay into emission/absorption pairs.
///
/// The transmon pair sums to 1/T1 with ratio exp(−ħω01/k_BT_Q). For the two
/// oscillators the loss rate is the measured κ and the gain rate is
/// κ·exp(−ħω/k_BT). Pure dephasing follows 1/T2* = 1/(2T1) + γφ1.
pub fn rates_from_measured(
    measured: &MeasuredDecay,
    bath: &BathSpec,
    spectrum: &TransmonSpectrum,
    cavity_freq: f64,
    nr_freq: f64,
) -> Result<RateSet> {
    bath.validate()?;
    for (name, v) in [
        ("t1", measured.t1),
        ("t2_star", measured.t2_star),
        ("kappa_cpw", measured.kappa_cpw),
        ("kappa_nr", measured.kappa_nr),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, "must be positive"));
        }
    }
    for (name, v) in [
        ("gamma12_ratio", measured.gamma12_ratio),
        ("dephasing2_ratio", measured.dephasing2_ratio),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::param(name, "must be nonnegative"));
        }
    }
    if measured.t2_star > 2.0 * measured.t1 {
        return Err(Error::param("t2_star", "exceeds 2·T1, which is unphysical"));
    }
    if spectrum.n_levels() < 2 {
        return Err(Error::param("spectrum", "needs at least two transmon levels"));
    }

    let r01 = boltzmann_factor(spectrum.omega01(), bath.transmon);
    let gamma01_down = 1.0 / (measured.t1 * (1.0 + r01));
    let gamma12_down = measured.gamma12_ratio * gamma01_down;
    let r12 = if spectrum.n_levels() > 2 {
        boltzmann_factor(spectrum.transition(1, 2), bath.transmon)
    } else {
        0.0
    };
    let dephasing1 = (1.0 / measured.t2_star - 0.5 / measured.t1).max(0.0);

    Ok(RateSet {
        kappa_cpw_down: measured.kappa_cpw,
        kappa_cpw_up: measured.kappa_cpw * boltzmann_factor(cavity_freq, bath.cavity),
        kappa_nr_down: measured.kappa_nr,
        kappa_nr_up: measured.kappa_nr * boltzmann_factor(nr_freq, bath.nanoresonator),
        gamma01_down,
        gamma01_up: gamma01_down * r01,
        gamma12_down,
        gamma12_up: gamma12_down * r12,
        dephasing1,
        dephasing2: measured.dephasing2_ratio * dephasing1,
    })
}

/// One Lindblad channel: `rate·D[operator]`.
#[derive(Debug, Clone)]
pub struct Collapse {
    pub name: &'static str,
    pub rate: f64,
    pub operator: QuantumOperator,
}

/// The ten paper channels on a (transmon, cavity, nanoresonator) layout.
///
/// Dephasing projectors carry half the dephasing rate. Level-2 channels are
/// omitted when the transmon keeps only two levels.
pub fn collapse_operators(rates: &RateSet, layout: &HilbertLayout) -> Result<Vec<Collapse>> {
    if layout.n_subsystems() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: layout.n_subsystems(),
        });
    }
    let dims = layout.dims();
    let a = embed(&annihilation(dims[CAVITY])?, CAVITY, layout)?;
    let b = embed(&annihilation(dims[NANORESONATOR])?, NANORESONATOR, layout)?;
    let dt = dims[TRANSMON];
    let t = |i: usize, j: usize| -> Result<QuantumOperator> {
        embed(&QuantumOperator::transition(dt, i, j)?, TRANSMON, layout)
    };

    let mut out = vec![
        Collapse { name: "cavity_loss", rate: rates.kappa_cpw_down, operator: a.clone() },
        Collapse { name: "cavity_gain", rate: rates.kappa_cpw_up, operator: a.adjoint() },
        Collapse { name: "nr_loss", rate: rates.kappa_nr_down, operator: b.clone() },
        Collapse { name: "nr_gain", rate: rates.kappa_nr_up, operator: b.adjoint() },
        Collapse { name: "relax_01", rate: rates.gamma01_down, operator: t(0, 1)? },
        Collapse { name: "excite_01", rate: rates.gamma01_up, operator: t(1, 0)? },
    ];
    if dt > 2 {
        out.push(Collapse { name: "relax_12", rate: rates.gamma12_down, operator: t(1, 2)? });
        out.push(Collapse { name: "excite_12", rate: rates.gamma12_up, operator: t(2, 1)? });
    }
    out.push(Collapse { name: "dephase_1", rate: 0.5 * rates.dephasing1, operator: t(1, 1)? });
    if dt > 2 {
        out.push(Collapse { name: "dephase_2", rate: 0.5 * rates.dephasing2, operator: t(2, 2)? });
    }
    Ok(out)
}

/// `L = −i[H, ·] + Σ_k rate_k·D[A_k]`.
pub fn liouvillian(h: &QuantumOperator, collapses: &[Collapse]) -> Result<Superoperator> {
    h.require_hermitian(Tolerances::default().hermiticity)?;
    let mut l = Superoperator::zeros(h.layout());
    l.add_hamiltonian(h);
    for c in collapses {
        if c.operator.layout() != h.layout() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: c.operator.dim(),
            });
        }
        if !(c.rate >= 0.0) {
            return Err(Error::param(c.name, "rate must be nonnegative"));
        }
        l.add_dissipator(c.rate, &c.operator);
    }
    Ok(l)
}

/// How a steady state was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    Dense,
    Sectors { sweeps: usize },
}

/// A normalized, Hermitian solution of Lρ = 0 with cached observables.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: QuantumOperator,
    /// ‖L·vec(ρ)‖.
    pub residual: f64,
    /// ‖L·vec(ρ)‖ / (‖L‖·‖vec(ρ)‖).
    pub relative_residual: f64,
    /// Level populations of each subsystem, in layout order.
    pub populations: Vec<Vec<f64>>,
    /// ⟨a⟩ when the layout has a subsystem labelled `cavity`.
    pub cavity_amplitude: Option<C64>,
    pub method: SolveMethod,
}

impl SteadyState {
    pub(crate) fn new(rho: QuantumOperator, residual: f64, l_norm: f64, method: SolveMethod) -> Self {
        let rho = rho.hermitian_part();
        let layout = rho.layout().clone();
        let populations: Vec<Vec<f64>> = (0..layout.n_subsystems()).map(|s| rho.reduced_populations(s)).collect();
        for (label, p) in layout.labels().iter().zip(&populations) {
            let top = *p.last().expect("dims are at least two");
            if top > TRUNCATION_WARNING {
                debug!("top level of `{label}` holds population {top:.2e}; truncation may be too small");
            }
        }
        let cavity_amplitude = layout.position("cavity").and_then(|pos| {
            let a = embed(&annihilation(layout.dims()[pos]).ok()?, pos, &layout).ok()?;
            expectation(&rho, &a).ok()
        });
        let relative_residual = residual / (l_norm * rho.frobenius_norm()).max(f64::MIN_POSITIVE);
        Self {
            rho,
            residual,
            relative_residual,
            populations,
            cavity_amplitude,
            method,
        }
    }

    /// Populations of the subsystem labelled `label`.
    pub fn populations_of(&self, label: &str) -> Option<&[f64]> {
        let pos = self.rho.layout().position(label)?;
        Some(&self.populations[pos])
    }

    pub fn expectation(&self, op: &QuantumOperator) -> Result<C64> {
        expectation(&self.rho, op)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho.eigenvalues_hermitian()[0]
    }
}

/// Solves Lρ = 0 with Tr ρ = 1 by dense LU.
///
/// The equation for the first population is replaced by the trace condition.
/// One refinement step is taken if the residual misses the tolerance; a
/// solution that is not a bounded state reveals a degenerate steady manifold.
pub fn steady_state(l: &Superoperator) -> Result<SteadyState> {
    let tol = Tolerances::default();
    let defect = l.trace_defect();
    if defect > tol.trace_preservation {
        return Err(Error::NotTracePreserving { defect });
    }
    let layout = l.layout().clone();
    let d = layout.total_dim();
    let n = d * d;

    let mut a = l.matrix().clone();
    for j in 0..n {
        a[(0, j)] = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        a[(0, i + d * i)] = C64::new(1.0, 0.0);
    }
    let lu = a.partial_piv_lu();
    let mut b = Mat::<C64>::zeros(n, 1);
    b[(0, 0)] = C64::new(1.0, 0.0);
    let mut x = lu.solve(&b);

    let l_norm = l.frobenius_norm();
    let rel_residual = |x: &Mat<C64>| -> (f64, f64) {
        let v: Vec<C64> = x.col_as_slice(0).to_vec();
        let r = l.apply_vec(&v);
        let abs = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let xn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (abs, abs / (l_norm * xn).max(f64::MIN_POSITIVE))
    };
    let (mut abs, mut rel) = rel_residual(&x);
    if rel > tol.steady_state_residual && rel.is_finite() {
        let ax = &a * &x;
        let corr = lu.solve(&(&b - &ax));
        x = &x + &corr;
        (abs, rel) = rel_residual(&x);
    }

    let rho = devectorize_on(x.col_as_slice(0), &layout)?;
    let bounded = rho.frobenius_norm() <= 1.0 + 1e-6;
    if !rel.is_finite() || !bounded || rel > tol.steady_state_residual {
        return Err(Error::DegenerateSteadyState { residual: rel });
    }
    Ok(SteadyState::new(rho, abs, l_norm, SolveMethod::Dense))
}

/// Thermal state of a truncated oscillator: p_n ∝ rⁿ.
pub fn truncated_thermal_populations(ratio: f64, dim: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// ‖L·vec(ρ)‖ for an arbitrary operator, via the dense superoperator.
pub fn residual_norm(l: &Superoperator, rho: &QuantumOperator) -> f64 {
    l.apply_vec(&vectorize(rho)).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
