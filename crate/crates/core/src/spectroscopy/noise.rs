//! Displacement-noise spectral density of the nanoresonator and the
//! transmon linewidth it produces.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the noise-limited linewidth γ(ω) (all rates in rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinewidthModel {
    pub lambda: f64,
    pub nr_freq: f64,
    pub kappa_nr: f64,
    /// Thermal occupation of the nanoresonator.
    pub n_th: f64,
    /// Background linewidth from every other channel.
    pub gamma0: f64,
}

impl LinewidthModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_nr > 0.0 && self.kappa_nr.is_finite()) {
            return Err(Error::param("kappa_nr", "must be positive"));
        }
        if !(self.nr_freq > 0.0 && self.nr_freq.is_finite()) {
            return Err(Error::param("nr_freq", "must be positive"));
        }
        if !(self.n_th >= 0.0 && self.n_th.is_finite()) {
            return Err(Error::param("n_th", "must be nonnegative"));
        }
        if !(self.gamma0 >= 0.0 && self.gamma0.is_finite()) {
            return Err(Error::param("gamma0", "must be nonnegative"));
        }
        if !self.lambda.is_finite() {
            return Err(Error::param("lambda", "must be finite"));
        }
        Ok(())
    }

    /// Height of the noise peak above γ0 in the cold limit, 4λ²/κ_NR.
    pub fn peak_height(&self) -> f64 {
        4.0 * self.lambda * self.lambda / self.kappa_nr
    }

    /// Q_NR = ω_NR/κ_NR.
    pub fn quality_factor(&self) -> f64 {
        self.nr_freq / self.kappa_nr
    }
}

/// Emission (`Positive`, NR absorbs from the transmon) or absorption side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseSign {
    Positive,
    Negative,
}

/// S_x(±ω) in units of x_zp²·s.
pub fn sx_noise(model: &LinewidthModel, omega: f64, sign: NoiseSign) -> f64 {
    let half = 0.5 * model.kappa_nr;
    match sign {
        NoiseSign::Positive => {
            model.kappa_nr * (model.n_th + 1.0) / ((model.nr_freq - omega).powi(2) + half * half)
        }
        NoiseSign::Negative => model.kappa_nr * model.n_th / ((model.nr_freq + omega).powi(2) + half * half),
    }
}

/// γ(ω) = λ²(S_x(ω) + S_x(−ω))/x_zp² + γ0.
pub fn noise_linewidth(model: &LinewidthModel, omega: f64) -> f64 {
    let s = sx_noise(model, omega, NoiseSign::Positive) + sx_noise(model, omega, NoiseSign::Negative);
    model.lambda * model.lambda * s + model.gamma0
}

/// Cold-limit single Lorentzian γ0 + λ²κ/((ω − ω_NR)² + (κ/2)²).
pub fn lorentzian_linewidth(model: &LinewidthModel, omega: f64) -> f64 {
    let half = 0.5 * model.kappa_nr;
    model.gamma0 + model.lambda * model.lambda * model.kappa_nr / ((omega - model.nr_freq).powi(2) + half * half)
}

/// λ = √((γ_peak − γ0)·κ_NR/4), the inverse of the cold-limit peak height.
pub fn coupling_from_peak(gamma_peak: f64, gamma0: f64, kappa_nr: f64) -> Result<f64> {
    if !(gamma_peak > gamma0) {
        return Err(Error::param("gamma_peak", "must exceed the background linewidth"));
    }
    if !(kappa_nr > 0.0) {
        return Err(Error::param("kappa_nr", "must be positive"));
    }
    Ok(((gamma_peak - gamma0) * kappa_nr / 4.0).sqrt())
}

/// Cold-limit γ(ω) samples with multiplicative Gaussian noise of relative size `noise`.
pub fn synthetic_linewidth<R: Rng + ?Sized>(
    model: &LinewidthModel,
    omegas: &[f64],
    noise: f64,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    model.validate()?;
    let normal = Normal::new(0.0, noise).map_err(|e| Error::param("noise", e.to_string()))?;
    Ok(omegas
        .iter()
        .map(|&w| (w, lorentzian_linewidth(model, w) * (1.0 + normal.sample(rng))))
        .collect())
}
