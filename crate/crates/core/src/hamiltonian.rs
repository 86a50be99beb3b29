//! Drive-frame Hamiltonian of the transmon–cavity–nanoresonator system.
//!
//! All three subsystems are rotated at the probe frequency and the coupling
//! terms are reduced to their excitation-conserving part, which leaves a
//! time-independent Hamiltonian. Only neighbouring-level transmon couplings
//! survive that projection.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::opalg::{annihilation, embed, HilbertLayout, QuantumOperator, CAVITY, NANORESONATOR, TRANSMON};
use crate::transmon::TransmonSpectrum;

/// Hermitian table of couplings c_lm between transmon levels (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    n: usize,
    values: Vec<C64>,
}

impl CouplingTable {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    /// Row-major explicit table.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
            });
        }
        Ok(Self {
            n,
            values: rows.iter().flatten().copied().collect(),
        })
    }

    /// c_lm = c_01·⟨l|n̂|m⟩/⟨0|n̂|1⟩ for every retained pair.
    pub fn scaled(spectrum: &TransmonSpectrum, c01: f64) -> Self {
        let n = spectrum.n_levels();
        let mut t = Self::zeros(n);
        if n < 2 {
            return t;
        }
        for l in 0..n {
            for m in 0..n {
                t.values[l * n + m] = C64::new(c01 * spectrum.coupling_ratio(l, m), 0.0);
            }
        }
        t
    }

    /// Sets c_lm and c_ml = c_lm*.
    pub fn with_override(mut self, l: usize, m: usize, value: f64) -> Self {
        if l < self.n && m < self.n {
            self.values[l * self.n + m] = C64::new(value, 0.0);
            self.values[m * self.n + l] = C64::new(value, 0.0);
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, l: usize, m: usize) -> C64 {
        self.values[l * self.n + m]
    }

    pub fn set(&mut self, l: usize, m: usize, value: C64) {
        self.values[l * self.n + m] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm() == 0.0)
    }

    /// Largest |c_lm − c_ml*|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 0..self.n {
            for m in 0..self.n {
                worst = worst.max((self.get(l, m) - self.get(m, l).conj()).norm());
            }
        }
        worst
    }
}

/// Frequencies, couplings and drive that define the system Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// ω_cpw (rad/s).
    pub cavity_freq: f64,
    /// ω_NR (rad/s).
    pub nr_freq: f64,
    /// g_lm (rad/s).
    pub g: CouplingTable,
    /// λ_lm (rad/s).
    pub lambda: CouplingTable,
    /// E_d (rad/s).
    pub drive_amplitude: f64,
    /// ω_d (rad/s).
    pub drive_freq: f64,
    /// Direct cavity–nanoresonator exchange rate (rad/s); zero leaves it out.
    pub nr_cavity_coupling: f64,
}

impl SystemParams {
    /// Couplings scaled from g_01 and λ_01 by the transmon charge matrix elements,
    /// with an optional fixed g_12.
    pub fn from_spectrum(
        spectrum: &TransmonSpectrum,
        cavity_freq: f64,
        nr_freq: f64,
        g01: f64,
        g12: Option<f64>,
        lambda01: f64,
    ) -> Self {
        let mut g = CouplingTable::scaled(spectrum, g01);
        if let Some(v) = g12 {
            g = g.with_override(1, 2, v);
        }
        Self {
            cavity_freq,
            nr_freq,
            g,
            lambda: CouplingTable::scaled(spectrum, lambda01),
            drive_amplitude: 0.0,
            drive_freq: cavity_freq,
            nr_cavity_coupling: 0.0,
        }
    }

    pub fn with_drive(mut self, amplitude: f64, freq: f64) -> Self {
        self.drive_amplitude = amplitude;
        self.drive_freq = freq;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("cavity_freq", self.cavity_freq),
            ("nr_freq", self.nr_freq),
            ("drive_freq", self.drive_freq),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        if !(self.drive_amplitude >= 0.0) {
            return Err(Error::param("drive_amplitude", "must be nonnegative"));
        }
        Ok(())
    }
}

/// Probe drive E_d(e^{iωt}a + e^{−iωt}a†), kept symbolic until the frame change.
#[derive(Debug, Clone)]
pub struct DriveTerm {
    pub amplitude: f64,
    pub frequency: f64,
    pub lowering: QuantumOperator,
    pub raising: QuantumOperator,
}

impl DriveTerm {
    pub fn is_null(&self) -> bool {
        self.amplitude == 0.0
    }
}

fn require_hybrid(layout: &HilbertLayout) -> Result<()> {
    if layout.n_subsystems() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: layout.n_subsystems(),
        });
    }
    Ok(())
}

/// Embedded lowering operators (transmon ladder, a, b) on a hybrid layout.
fn ladders(layout: &HilbertLayout) -> Result<(QuantumOperator, QuantumOperator)> {
    let dims = layout.dims();
    let a = embed(&annihilation(dims[CAVITY])?, CAVITY, layout)?;
    let b = embed(&annihilation(dims[NANORESONATOR])?, NANORESONATOR, layout)?;
    Ok((a, b))
}

/// Transmon operator Σ_lm c_lm |l⟩⟨m| on the full space.
fn transmon_operator(table: &CouplingTable, layout: &HilbertLayout) -> Result<QuantumOperator> {
    let d = layout.dims()[TRANSMON];
    if table.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: table.dim(),
        });
    }
    let single = HilbertLayout::single(d)?;
    let op = QuantumOperator::from_fn(&single, |l, m| table.get(l, m));
    embed(&op, TRANSMON, layout)
}

/// Σ_m ω_0m|m⟩⟨m| + ω_cpw a†a + ω_NR b†b.
pub fn bare_hamiltonian(
    spectrum: &TransmonSpectrum,
    params: &SystemParams,
    layout: &HilbertLayout,
) -> Result<QuantumOperator> {
    require_hybrid(layout)?;
    if spectrum.n_levels() != layout.dims()[TRANSMON] {
        return Err(Error::DimensionMismatch {
            expected: layout.dims()[TRANSMON],
            found: spectrum.n_levels(),
        });
    }
    let diag: Vec<f64> = (0..layout.total_dim())
        .map(|i| {
            let lv = layout.levels_of(i);
            spectrum.levels[lv[TRANSMON]]
                + params.cavity_freq * lv[CAVITY] as f64
                + params.nr_freq * lv[NANORESONATOR] as f64
        })
        .collect();
    QuantumOperator::diagonal(layout, &diag)
}

/// Full couplings Σ g_lm|l⟩⟨m|(a† + a) and Σ λ_lm|l⟩⟨m|(b† + b).
pub fn coupling_hamiltonians(
    spectrum: &TransmonSpectrum,
    params: &SystemParams,
    layout: &HilbertLayout,
) -> Result<(QuantumOperator, QuantumOperator)> {
    require_hybrid(layout)?;
    if spectrum.n_levels() != layout.dims()[TRANSMON] {
        return Err(Error::DimensionMismatch {
            expected: layout.dims()[TRANSMON],
            found: spectrum.n_levels(),
        });
    }
    for (name, table) in [("g", &params.g), ("lambda", &params.lambda)] {
        let defect = table.hermiticity_defect();
        let scale = table.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if defect > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::param(name, format!("coupling table is not Hermitian (defect {defect:.3e})")));
        }
    }
    let (a, b) = ladders(layout)?;
    let xa = &a + &a.adjoint();
    let xb = &b + &b.adjoint();
    let tg = transmon_operator(&params.g, layout)?;
    let tl = transmon_operator(&params.lambda, layout)?;
    Ok((&tg * &xa, &tl * &xb))
}

/// Drive record carrying E_d, ω_d and the cavity ladder pair.
pub fn drive_hamiltonian(params: &SystemParams, layout: &HilbertLayout) -> Result<DriveTerm> {
    require_hybrid(layout)?;
    let (a, _) = ladders(layout)?;
    Ok(DriveTerm {
        amplitude: params.drive_amplitude,
        frequency: params.drive_freq,
        raising: a.adjoint(),
        lowering: a,
    })
}

/// Total excitation number m + n_c + n_b on each basis state.
pub fn excitation_numbers(layout: &HilbertLayout) -> Vec<i64> {
    (0..layout.total_dim())
        .map(|i| layout.levels_of(i).iter().sum::<usize>() as i64)
        .collect()
}

/// N = Σ m|m⟩⟨m| + a†a + b†b.
pub fn excitation_operator(layout: &HilbertLayout) -> QuantumOperator {
    let diag: Vec<f64> = excitation_numbers(layout).iter().map(|&n| n as f64).collect();
    QuantumOperator::diagonal(layout, &diag).expect("length matches layout")
}

/// Keeps only the matrix elements that conserve the excitation number.
pub fn excitation_conserving_part(op: &QuantumOperator) -> QuantumOperator {
    let n = excitation_numbers(op.layout());
    QuantumOperator::from_fn(op.layout(), |i, j| {
        if n[i] == n[j] {
            op.get(i, j)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Time-independent Hamiltonian in the frame rotating at `drive_freq`.
///
/// `H = H_bare − ω_d·N + P_N(Σ couplings) + E_d(a + a†)` where `P_N` keeps
/// the excitation-conserving (rotating-wave) part of each coupling.
pub fn rotating_frame(
    bare: &QuantumOperator,
    couplings: &[&QuantumOperator],
    drive: &DriveTerm,
    drive_freq: f64,
) -> Result<QuantumOperator> {
    let layout = bare.layout();
    let n = excitation_numbers(layout);
    let mut h = bare.clone();
    for (i, &ni) in n.iter().enumerate() {
        let v = h.get(i, i) - C64::new(drive_freq * ni as f64, 0.0);
        h.set(i, i, v);
    }
    for c in couplings {
        if c.layout() != layout {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: c.dim(),
            });
        }
        h = &h + &excitation_conserving_part(c);
    }
    if !drive.is_null() {
        let x = &drive.lowering + &drive.raising;
        h = &h + &x.scale_real(drive.amplitude);
    }
    Ok(h)
}

/// Drive-frame Hamiltonian assembled end to end.
pub fn system_hamiltonian(
    spectrum: &TransmonSpectrum,
    params: &SystemParams,
    layout: &HilbertLayout,
) -> Result<QuantumOperator> {
    params.validate()?;
    let bare = bare_hamiltonian(spectrum, params, layout)?;
    let (hg, hl) = coupling_hamiltonians(spectrum, params, layout)?;
    let drive = drive_hamiltonian(params, layout)?;
    let mut couplings = vec![hg, hl];
    if params.nr_cavity_coupling != 0.0 {
        let (a, b) = ladders(layout)?;
        let xa = &a + &a.adjoint();
        let xb = &b + &b.adjoint();
        couplings.push((&xa * &xb).scale_real(params.nr_cavity_coupling));
    }
    let refs: Vec<&QuantumOperator> = couplings.iter().collect();
    rotating_frame(&bare, &refs, &drive, params.drive_freq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transmon::{spectrum_at_flux, TransmonParams};

    fn toy_spectrum() -> TransmonSpectrum {
        TransmonSpectrum::from_parts(0.0, vec![0.0, 5.0], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn drive_at_cavity_frequency_removes_cavity_term() {
        let layout = HilbertLayout::hybrid(2, 3, 2).unwrap();
        let spec = toy_spectrum();
        let p = SystemParams::from_spectrum(&spec, 7.0, 3.0, 0.0, None, 0.0).with_drive(0.0, 7.0);
        let h = system_hamiltonian(&spec, &p, &layout).unwrap();
        for nc in 0..3 {
            let i = layout.index_of(&[0, nc, 0]);
            assert_eq!(h.get(i, i).re, 0.0);
        }
    }

    #[test]
    fn zero_lambda_gives_zero_coupling() {
        let layout = HilbertLayout::default();
        let spec = spectrum_at_flux(&TransmonParams::default(), 0.3, 3).unwrap();
        let p = SystemParams::from_spectrum(&spec, 31.0e9, 21.8e9, 0.75e9, None, 0.0);
        let (_, hl) = coupling_hamiltonians(&spec, &p, &layout).unwrap();
        assert_eq!(hl.frobenius_norm(), 0.0);
    }

    #[test]
    fn non_hermitian_table_rejected() {
        let layout = HilbertLayout::hybrid(2, 2, 2).unwrap();
        let spec = toy_spectrum();
        let mut p = SystemParams::from_spectrum(&spec, 7.0, 3.0, 1.0, None, 0.0);
        p.g.set(0, 1, C64::new(0.0, 1.0));
        assert!(matches!(
            coupling_hamiltonians(&spec, &p, &layout),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn null_drive() {
        let layout = HilbertLayout::hybrid(2, 2, 2).unwrap();
        let p = SystemParams::from_spectrum(&toy_spectrum(), 7.0, 3.0, 1.0, None, 0.0);
        let d = drive_hamiltonian(&p, &layout).unwrap();
        assert!(d.is_null());
        let d = drive_hamiltonian(&p.clone().with_drive(0.25, 6.5), &layout).unwrap();
        assert_eq!((d.amplitude, d.frequency), (0.25, 6.5));
    }

    #[test]
    fn single_excitation_block_couples_with_g01() {
        let layout = HilbertLayout::hybrid(2, 2, 2).unwrap();
        let spec = toy_spectrum();
        let p = SystemParams::from_spectrum(&spec, 5.0, 3.0, 0.1, None, 0.0).with_drive(0.0, 5.0);
        let h = system_hamiltonian(&spec, &p, &layout).unwrap();
        let e = layout.index_of(&[1, 0, 0]);
        let c = layout.index_of(&[0, 1, 0]);
        assert!((h.get(e, c).re - 0.1).abs() < 1e-15);
        assert_eq!(h.get(layout.index_of(&[1, 1, 0]), layout.index_of(&[0, 0, 0])).norm(), 0.0);
    }
}
