//! Lag-weighted representation of the integrated estimator:
//!
//! ```text
//! F̂(λ; τ1, τ2) = (1/2π) Σ_{|k|≤m-1} w_λ(k) ((m-|k|)/m) γ̂_k(τ1, τ2),
//! w_λ(k)       = (2π/m) Σ_{s=1}^{m-1} I{2πs/m ≤ λ} e^{-ik2πs/m}.
//! ```
//!
//! It is algebraically identical to the frequency-sum form and is kept as an
//! independent check on it.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::SpectralSurface;
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, QuantileGrid};
use crate::ranks::empirical_cdf_at_points;

/// Weights `w_λ(k)` for `|k| ≤ n-1` at one grid frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct LagWeights {
    n: usize,
    values: Vec<Complex64>,
}

impl LagWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: isize) -> Complex64 {
        self.values[(k + self.n as isize - 1) as usize]
    }
}

/// Direct-sum weights for the frequency `fgrid.lambda(ell)`.
pub fn lag_weights(n: usize, fgrid: &FrequencyGrid, ell: usize) -> Result<LagWeights> {
    if n < 2 {
        return Err(Error::InvalidSeries(format!("lag weights need n >= 2, got {n}")));
    }
    let cut = fgrid.cutoff(ell, n).min(n - 1);
    let values = (-(n as isize - 1)..=(n as isize - 1))
        .map(|k| {
            (1..=cut)
                .map(|s| Complex64::from_polar(1.0, -2.0 * PI * (k * s as isize) as f64 / n as f64))
                .sum::<Complex64>()
                * (2.0 * PI / n as f64)
        })
        .collect();
    Ok(LagWeights { n, values })
}

/// Rank-based copula cumulant
/// `γ̂_k = (1/(m-|k|)) Σ_{t∈T_k} (I{F̂(X_{t+k}) ≤ τ1} - τ1)(I{F̂(X_t) ≤ τ2} - τ2)`.
pub fn rank_cumulant(window: &[f64], k: isize, tau1: f64, tau2: f64) -> Result<f64> {
    let ecdf = empirical_cdf_at_points(window)?;
    cumulant_from_ecdf(&ecdf, k, tau1, tau2)
}

fn cumulant_from_ecdf(ecdf: &[f64], k: isize, tau1: f64, tau2: f64) -> Result<f64> {
    let m = ecdf.len();
    if k.unsigned_abs() >= m {
        return Err(Error::LagOutOfRange { lag: k, len: m });
    }
    let centred = |t: usize, tau: f64| (if ecdf[t] <= tau { 1.0 } else { 0.0 }) - tau;
    let (lo, hi) = if k >= 0 { (0, m - k as usize) } else { ((-k) as usize, m) };
    let sum: f64 = (lo..hi)
        .map(|t| centred((t as isize + k) as usize, tau1) * centred(t, tau2))
        .sum();
    Ok(sum / (m - k.unsigned_abs()) as f64)
}

/// Lag-form estimate at a single `(λ_ℓ, τ1, τ2)`.
pub fn integrated_spectrum_lagform(
    window: &[f64],
    fgrid: &FrequencyGrid,
    ell: usize,
    tau1: f64,
    tau2: f64,
) -> Result<Complex64> {
    let m = window.len();
    let weights = lag_weights(m, fgrid, ell)?;
    let ecdf = empirical_cdf_at_points(window)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -(m as isize - 1)..=(m as isize - 1) {
        let gamma = cumulant_from_ecdf(&ecdf, k, tau1, tau2)?;
        acc += weights.get(k) * ((m - k.unsigned_abs()) as f64 / m as f64 * gamma);
    }
    Ok(acc / (2.0 * PI))
}

/// Lag-form estimate over a whole grid, sharing weights and cumulants.
pub fn integrated_spectrum_lagform_surface(
    window: &[f64],
    fgrid: &FrequencyGrid,
    qgrid: &QuantileGrid,
) -> Result<SpectralSurface> {
    let m = window.len();
    let ecdf = empirical_cdf_at_points(window)?;
    let weights = (0..fgrid.len())
        .map(|ell| lag_weights(m, fgrid, ell))
        .collect::<Result<Vec<_>>>()?;
    let q = qgrid.len();
    let lags = -(m as isize - 1)..=(m as isize - 1);
    // scaled[i][j][k] = ((m-|k|)/m) γ̂_k(τ_i, τ_j)
    let mut scaled = vec![vec![Vec::with_capacity(2 * m - 1); q]; q];
    for (i, &t1) in qgrid.levels().iter().enumerate() {
        for (j, &t2) in qgrid.levels().iter().enumerate() {
            for k in lags.clone() {
                let gamma = cumulant_from_ecdf(&ecdf, k, t1, t2)?;
                scaled[i][j].push((m - k.unsigned_abs()) as f64 / m as f64 * gamma);
            }
        }
    }
    let mut surface = SpectralSurface::zeros(*fgrid, qgrid.clone());
    for (ell, w) in weights.iter().enumerate() {
        for (i, row) in scaled.iter().enumerate() {
            for (j, cumulants) in row.iter().enumerate() {
                let acc: Complex64 = lags
                    .clone()
                    .zip(cumulants)
                    .map(|(k, &g)| w.get(k) * g)
                    .sum();
                surface.set(ell, i, j, acc / (2.0 * PI));
            }
        }
    }
    Ok(surface)
}
