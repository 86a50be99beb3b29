//! Least-squares fit of the cold-limit linewidth Lorentzian.

use serde::Serialize;

use super::noise::{lorentzian_linewidth, LinewidthModel};
use crate::error::{Error, Result};

/// Simplex controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop when the simplex cost spread falls below this, relative to the
    /// best cost plus the tolerance itself (the cost is dimensionless).
    pub tolerance: f64,
    /// Nelder–Mead restarts from the previous optimum.
    pub restarts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 4000,
            tolerance: 1e-12,
            restarts: 2,
        }
    }
}

/// Fitted model plus diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinewidthFit {
    pub model: LinewidthModel,
    /// Peak height above γ0 (rad/s).
    pub amplitude: f64,
    /// √(Σ relative residual²).
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Fit parameters live in a scaled space: centre offset in units of the
/// seed width, log width, log height, background in units of the seed height.
struct Scaling {
    w0: f64,
    k0: f64,
    a0: f64,
}

impl Scaling {
    fn model(&self, p: &[f64; 4]) -> (LinewidthModel, f64) {
        let kappa = self.k0 * p[1].exp();
        let amplitude = self.a0 * p[2].exp();
        let model = LinewidthModel {
            lambda: (amplitude * kappa / 4.0).sqrt(),
            nr_freq: self.w0 + p[0] * self.k0,
            kappa_nr: kappa,
            n_th: 0.0,
            gamma0: p[3] * self.a0,
        };
        (model, amplitude)
    }
}

fn cost(data: &[(f64, f64)], model: &LinewidthModel) -> f64 {
    if !(model.gamma0 >= 0.0) {
        return f64::INFINITY;
    }
    data.iter()
        .map(|&(w, g)| {
            let r = (lorentzian_linewidth(model, w) - g) / g.abs().max(f64::MIN_POSITIVE);
            r * r
        })
        .sum()
}

fn nelder_mead<F: Fn(&[f64; 4]) -> f64>(f: F, start: [f64; 4], step: f64, opts: &FitOptions) -> ([f64; 4], f64, usize, bool) {
    let mut simplex: Vec<([f64; 4], f64)> = (0..5)
        .map(|i| {
            let mut p = start;
            if i > 0 {
                p[i - 1] += step;
            }
            (p, f(&p))
        })
        .collect();
    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[4].1;
        if (worst - best).abs() <= opts.tolerance * (best.abs() + opts.tolerance) {
            return (simplex[0].0, best, iterations, true);
        }
        if iterations >= opts.max_iterations {
            return (simplex[0].0, best, iterations, false);
        }
        iterations += 1;

        let mut centroid = [0.0; 4];
        for (p, _) in &simplex[..4] {
            for k in 0..4 {
                centroid[k] += p[k] / 4.0;
            }
        }
        let along = |t: f64| -> [f64; 4] {
            let mut q = [0.0; 4];
            for k in 0..4 {
                q[k] = centroid[k] + t * (simplex[4].0[k] - centroid[k]);
            }
            q
        };
        let r = along(-1.0);
        let fr = f(&r);
        if fr < simplex[0].1 {
            let e = along(-2.0);
            let fe = f(&e);
            simplex[4] = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < simplex[3].1 {
            simplex[4] = (r, fr);
        } else {
            let (c, fc) = if fr < simplex[4].1 {
                let c = along(-0.5);
                (c, f(&c))
            } else {
                let c = along(0.5);
                (c, f(&c))
            };
            if fc < fr.min(simplex[4].1) {
                simplex[4] = (c, fc);
            } else {
                let b = simplex[0].0;
                for (p, fp) in simplex.iter_mut().skip(1) {
                    for k in 0..4 {
                        p[k] = b[k] + 0.5 * (p[k] - b[k]);
                    }
                    *fp = f(p);
                }
            }
        }
    }
}

/// Fits γ(ω) = γ0 + A·(κ/2)²/((ω − ω_NR)² + (κ/2)²) to `(ω, γ)` samples.
///
/// Seeds: ω_NR at the largest sample, κ from the half-maximum width, γ0 at
/// the smallest sample.
pub fn fit_linewidth(data: &[(f64, f64)], opts: &FitOptions) -> Result<LinewidthFit> {
    if data.len() < 8 {
        return Err(Error::InsufficientData {
            needed: 8,
            found: data.len(),
        });
    }
    if data.iter().any(|&(w, g)| !w.is_finite() || !g.is_finite()) {
        return Err(Error::param("data", "samples must be finite"));
    }
    let mut pts = data.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (imax, &(w_peak, g_peak)) = pts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("nonempty");
    let g_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let half = 0.5 * (g_peak + g_min);
    let left = pts[..imax].iter().rev().find(|p| p.1 < half).map(|p| p.0);
    let right = pts[imax..].iter().find(|p| p.1 < half).map(|p| p.0);
    let span = pts[pts.len() - 1].0 - pts[0].0;
    let width = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (w_peak - l),
        (None, Some(r)) => 2.0 * (r - w_peak),
        (None, None) => span / 2.0,
    };
    if !(width > 0.0) || !(g_peak > g_min) {
        return Err(Error::param("data", "no resolvable peak"));
    }
    if span < 2.0 * width {
        return Err(Error::param("data", "samples must span at least two linewidths"));
    }

    let scale = Scaling {
        w0: w_peak,
        k0: width,
        a0: g_peak - g_min,
    };
    let objective = |p: &[f64; 4]| {
        let (m, _) = scale.model(p);
        cost(&pts, &m)
    };
    let mut p = [0.0, 0.0, 0.0, g_min / scale.a0];
    let mut total = 0;
    let mut converged = false;
    let mut best = f64::INFINITY;
    for round in 0..=opts.restarts {
        let step = if round == 0 { 0.25 } else { 0.05 };
        let (q, fq, it, ok) = nelder_mead(objective, p, step, opts);
        total += it;
        p = q;
        best = fq;
        converged = ok;
    }
    if !converged {
        return Err(Error::FitNoConvergence {
            iterations: total,
            cost: best,
            best: p,
        });
    }
    let (model, amplitude) = scale.model(&p);
    Ok(LinewidthFit {
        model,
        amplitude,
        residual_norm: best.sqrt(),
        iterations: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular;

    #[test]
    fn too_few_samples() {
        let d: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(
            fit_linewidth(&d, &FitOptions::default()),
            Err(Error::InsufficientData { needed: 8, found: 5 })
        ));
    }

    #[test]
    fn noiseless_fixed_point() {
        let truth = LinewidthModel {
            lambda: angular(1.5e6),
            nr_freq: angular(3.47e9),
            kappa_nr: angular(24e6),
            n_th: 0.0,
            gamma0: angular(110e3),
        };
        let data: Vec<(f64, f64)> = (0..41)
            .map(|i| {
                let w = truth.nr_freq + angular(3e6) * (i as f64 - 20.0);
                (w, lorentzian_linewidth(&truth, w))
            })
            .collect();
        let fit = fit_linewidth(&data, &FitOptions::default()).unwrap().model;
        for (a, b) in [
            (fit.nr_freq, truth.nr_freq),
            (fit.kappa_nr, truth.kappa_nr),
            (fit.lambda, truth.lambda),
            (fit.gamma0, truth.gamma0),
        ] {
            assert!((a / b - 1.0).abs() < 1e-3, "{a} vs {b}");
        }
    }
}
