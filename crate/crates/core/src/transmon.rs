//! Cooper-pair-box spectrum in the charge basis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::angular;

/// Sweeps allowed per eigenvalue before the QL iteration gives up.
const MAX_QL_SWEEPS: usize = 60;

/// Circuit parameters of the transmon. Energies are angular frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    /// E_C/ħ (rad/s).
    pub charging_energy: f64,
    /// Maximum E_J/ħ at zero flux (rad/s).
    pub josephson_energy_max: f64,
    /// Odd number of charge states kept, centred on n = 0.
    pub n_charge_states: usize,
    /// Offset charge n_g in units of 2e.
    pub offset_charge: f64,
}

impl TransmonParams {
    pub fn new(
        charging_energy: f64,
        josephson_energy_max: f64,
        n_charge_states: usize,
        offset_charge: f64,
    ) -> Result<Self> {
        let p = Self {
            charging_energy,
            josephson_energy_max,
            n_charge_states,
            offset_charge,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds from E_C/h and E_J0/h given in Hz.
    pub fn from_hz(ec_hz: f64, ej0_hz: f64) -> Result<Self> {
        Self::new(angular(ec_hz), angular(ej0_hz), 51, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.charging_energy > 0.0 && self.charging_energy.is_finite()) {
            return Err(Error::param("charging_energy", "must be positive"));
        }
        if !(self.josephson_energy_max > 0.0 && self.josephson_energy_max.is_finite()) {
            return Err(Error::param("josephson_energy_max", "must be positive"));
        }
        if self.n_charge_states.is_multiple_of(2) || self.n_charge_states < 11 {
            return Err(Error::param("n_charge_states", "must be odd and at least 11"));
        }
        if !self.offset_charge.is_finite() {
            return Err(Error::param("offset_charge", "must be finite"));
        }
        Ok(())
    }

    /// E_J/E_C at the given flux.
    pub fn ej_over_ec(&self, flux: f64) -> f64 {
        josephson_energy(self.josephson_energy_max, flux) / self.charging_energy
    }
}

impl Default for TransmonParams {
    fn default() -> Self {
        Self::from_hz(0.227e9, 15.4e9).expect("default transmon parameters are valid")
    }
}

/// E_J(Φ) = E_J0·|cos(πΦ/Φ0)|, with `flux` in units of Φ0.
pub fn josephson_energy(ej0: f64, flux: f64) -> f64 {
    ej0 * (PI * flux).cos().abs()
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diagonal: Vec<f64>,
    /// `off_diagonal[i]` couples rows `i` and `i + 1`.
    pub off_diagonal: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::DimensionMismatch {
                expected: diagonal.len().saturating_sub(1),
                found: off_diagonal.len(),
            });
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diagonal[i];
            if i + 1 < n {
                m[i][i + 1] = self.off_diagonal[i];
                m[i + 1][i] = self.off_diagonal[i];
            }
        }
        m
    }

    /// `H·v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s += self.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off_diagonal[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let d: f64 = self.diagonal.iter().map(|x| x * x).sum();
        let o: f64 = self.off_diagonal.iter().map(|x| x * x).sum();
        (d + 2.0 * o).sqrt()
    }
}

/// Eigenpairs of a symmetric tridiagonal matrix, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector belonging to `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Charge-basis Hamiltonian: 4E_C(n − n_g)² on the diagonal, −E_J/2 between neighbours.
pub fn cpb_hamiltonian(params: &TransmonParams, ej: f64) -> SymTridiagonal {
    let n = params.n_charge_states;
    let half = (n / 2) as f64;
    let diagonal = (0..n)
        .map(|k| {
            let q = k as f64 - half - params.offset_charge;
            4.0 * params.charging_energy * q * q
        })
        .collect();
    SymTridiagonal {
        diagonal,
        off_diagonal: vec![-0.5 * ej; n - 1],
    }
}

/// Implicit-shift QL iteration with Wilkinson shifts.
pub fn diagonalize(h: &SymTridiagonal) -> Result<TridiagonalEigen> {
    let n = h.dim();
    let mut d = h.diagonal.clone();
    let mut e = h.off_diagonal.clone();
    e.push(0.0);
    // z[k] holds the k-th column of the accumulated rotation.
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut col = vec![0.0; n];
            col[k] = 1.0;
            col
        })
        .collect();

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_QL_SWEEPS {
                return Err(Error::EigenNoConvergence {
                    index: l,
                    iterations: sweeps,
                });
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (lo, hi) = z.split_at_mut(i + 1);
                let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                for k in 0..n {
                    let t = zi1[k];
                    zi1[k] = s * zi[k] + c * t;
                    zi[k] = c * zi[k] - s * t;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(TridiagonalEigen {
        values: order.iter().map(|&k| d[k]).collect(),
        vectors: order.iter().map(|&k| z[k].clone()).collect(),
    })
}

/// Retained transmon levels and charge matrix elements at one flux point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmonSpectrum {
    pub flux: f64,
    /// ω_0m (rad/s), ground at zero.
    pub levels: Vec<f64>,
    /// Row-major ⟨l|n̂|m⟩.
    charge_elements: Vec<f64>,
}

impl TransmonSpectrum {
    /// Spectrum assembled from explicit data, e.g. for reduced models.
    pub fn from_parts(flux: f64, levels: Vec<f64>, charge_elements: Vec<Vec<f64>>) -> Result<Self> {
        let n = levels.len();
        if charge_elements.len() != n || charge_elements.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: charge_elements.len(),
            });
        }
        Ok(Self {
            flux,
            levels,
            charge_elements: charge_elements.into_iter().flatten().collect(),
        })
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// ⟨l|n̂|m⟩.
    pub fn charge_element(&self, l: usize, m: usize) -> f64 {
        self.charge_elements[l * self.n_levels() + m]
    }

    /// ω_m − ω_l (rad/s).
    pub fn transition(&self, l: usize, m: usize) -> f64 {
        self.levels[m] - self.levels[l]
    }

    pub fn omega01(&self) -> f64 {
        self.transition(0, 1)
    }

    /// ω_12 − ω_01 (rad/s).
    pub fn anharmonicity(&self) -> f64 {
        self.transition(1, 2) - self.transition(0, 1)
    }

    /// ⟨l|n̂|m⟩/⟨0|n̂|1⟩.
    pub fn coupling_ratio(&self, l: usize, m: usize) -> f64 {
        self.charge_element(l, m) / self.charge_element(0, 1)
    }
}

/// Lowest `n_levels` eigenstates of the Cooper-pair box at `flux` (units of Φ0).
///
/// Eigenvector signs are fixed so that every ⟨l|n̂|l+1⟩ is nonnegative.
pub fn spectrum_at_flux(params: &TransmonParams, flux: f64, n_levels: usize) -> Result<TransmonSpectrum> {
    params.validate()?;
    if !(1..=5).contains(&n_levels) {
        return Err(Error::param("n_levels", "must be between 1 and 5"));
    }
    let h = cpb_hamiltonian(params, josephson_energy(params.josephson_energy_max, flux));
    let eig = diagonalize(&h)?;
    let half = (params.n_charge_states / 2) as f64;
    let charge: Vec<f64> = (0..params.n_charge_states).map(|k| k as f64 - half).collect();
    let element = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).zip(&charge).map(|((a, b), q)| a * b * q).sum() };

    let mut vectors: Vec<Vec<f64>> = eig.vectors[..n_levels].to_vec();
    for l in 0..n_levels.saturating_sub(1) {
        if element(&vectors[l], &vectors[l + 1]) < 0.0 {
            vectors[l + 1].iter_mut().for_each(|x| *x = -*x);
        }
    }
    let mut charge_elements = vec![0.0; n_levels * n_levels];
    for l in 0..n_levels {
        for m in l..n_levels {
            let v = element(&vectors[l], &vectors[m]);
            charge_elements[l * n_levels + m] = v;
            charge_elements[m * n_levels + l] = v;
        }
    }
    let e0 = eig.values[0];
    Ok(TransmonSpectrum {
        flux,
        levels: eig.values[..n_levels].iter().map(|e| e - e0).collect(),
        charge_elements,
    })
}

/// ω_01 at `flux`.
pub fn omega01_at(params: &TransmonParams, flux: f64) -> Result<f64> {
    Ok(spectrum_at_flux(params, flux, 2)?.omega01())
}

/// Flux in [0, 1/2] where ω_01 equals `target` (rad/s), by bisection.
pub fn flux_for_frequency(params: &TransmonParams, target: f64) -> Result<f64> {
    let max = omega01_at(params, 0.0)?;
    let min = omega01_at(params, 0.5)?;
    if !(target >= min && target <= max) {
        return Err(Error::OutOfRange { target, min, max });
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if omega01_at(params, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (w_lo, w_hi) = (omega01_at(params, lo)?, omega01_at(params, hi)?);
    let flux = if (w_lo - target).abs() <= (w_hi - target).abs() { lo } else { hi };
    let achieved = omega01_at(params, flux)?;
    if (achieved - target).abs() > 1e-6 * target {
        return Err(Error::OutOfRange { target, min, max });
    }
    Ok(flux)
}
