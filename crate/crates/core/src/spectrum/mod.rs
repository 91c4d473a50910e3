//! Copula rank periodograms and the integrated copula spectrum estimator.
//!
//! For a window `X_0, ..., X_{m-1}` with window-local empirical distribution
//! function `F̂`, the rank DFT is
//! `d^τ(ω) = Σ_t I{F̂(X_t) ≤ τ} e^{-iωt}`, the CR periodogram is
//! `I^{τ1,τ2}(ω) = d^{τ1}(ω) d^{τ2}(-ω) / (2πm)` and the estimator is
//!
//! ```text
//! F̂(λ; τ1, τ2) = (2π/m) Σ_{s=1}^{m-1} I{2πs/m ≤ λ} I^{τ1,τ2}(2πs/m).
//! ```
//!
//! The frequency cut-off is evaluated exactly as `s·d ≤ ℓ·m`.

mod lag;
mod surface;
mod truth;

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, QuantileGrid};
use crate::ranks::{indicator_matrix, IndicatorMatrix};

pub use lag::{
    integrated_spectrum_lagform, integrated_spectrum_lagform_surface, lag_weights, rank_cumulant,
    LagWeights,
};
pub use surface::SpectralSurface;
pub use truth::{iid_truth, iid_truth_surface, monte_carlo_truth};

/// Real or imaginary part of a complex estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

impl Part {
    pub fn of(self, z: Complex64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Part::Re => "re",
            Part::Im => "im",
        }
    }
}

impl std::str::FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "re" | "real" => Ok(Part::Re),
            "im" | "imag" | "imaginary" => Ok(Part::Im),
            other => Err(Error::Parse(format!("unknown part '{other}' (expected re|im)"))),
        }
    }
}

/// Rank DFT of one indicator column at the Fourier frequencies
/// `2πs/m`, `s = 1, ..., m-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDft {
    values: Vec<Complex64>,
}

impl RankDft {
    /// Window length `m`.
    pub fn window_len(&self) -> usize {
        self.values.len() + 1
    }

    /// `d^τ(2πs/m)` for `1 ≤ s ≤ m-1`.
    pub fn at(&self, s: usize) -> Complex64 {
        self.values[s - 1]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// DFT of a 0/1 column by FFT of length `m`; the `s = 0` term is dropped.
pub fn rank_dft(column: &[bool]) -> Result<RankDft> {
    let m = column.len();
    if m < 2 {
        return Err(Error::InvalidSeries(format!(
            "rank DFT needs a window of length >= 2, got {m}"
        )));
    }
    let mut buf: Vec<Complex64> = column
        .iter()
        .map(|&b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
        .collect();
    if column.iter().all(|&b| b) || !column.iter().any(|&b| b) {
        // Constant columns have an exactly vanishing DFT away from s = 0.
        return Ok(RankDft {
            values: vec![Complex64::new(0.0, 0.0); m - 1],
        });
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(m));
    fft.process(&mut buf);
    buf.remove(0);
    Ok(RankDft { values: buf })
}

/// CR periodogram `I^{τ1,τ2}(2πs/m)` for `s = 1, ..., m-1`.
pub fn cr_periodogram(window: &[f64], tau1: f64, tau2: f64) -> Result<Vec<Complex64>> {
    let m = window.len();
    if m < 2 {
        return Err(Error::InvalidSeries(format!(
            "periodogram needs a window of length >= 2, got {m}"
        )));
    }
    let grid = QuantileGrid::from_unsorted(vec![tau1, tau2])?;
    let ind = indicator_matrix(window, &grid)?;
    let d1 = rank_dft(ind.column(grid.index_of(tau1).expect("level in grid")))?;
    let d2 = rank_dft(ind.column(grid.index_of(tau2).expect("level in grid")))?;
    let scale = 1.0 / (2.0 * std::f64::consts::PI * m as f64);
    Ok(d1
        .values()
        .iter()
        .zip(d2.values())
        .map(|(a, b)| a * b.conj() * scale)
        .collect())
}

/// Integrated copula spectrum estimate of a window over the full
/// `(λ_ℓ, τ_i, τ_j)` product grid.
///
/// One DFT is computed per quantile level and the cross products are
/// accumulated once up to the largest cut-off `⌊⌊d/2⌋·m/d⌋ ≤ m/2`.
pub fn integrated_spectrum(
    window: &[f64],
    fgrid: &FrequencyGrid,
    qgrid: &QuantileGrid,
) -> Result<SpectralSurface> {
    if window.len() < 2 {
        return Err(Error::InvalidSeries(format!(
            "estimator needs a window of length >= 2, got {}",
            window.len()
        )));
    }
    let ind = indicator_matrix(window, qgrid)?;
    surface_from_indicators(&ind, fgrid, qgrid)
}

pub(crate) fn surface_from_indicators(
    ind: &IndicatorMatrix,
    fgrid: &FrequencyGrid,
    qgrid: &QuantileGrid,
) -> Result<SpectralSurface> {
    let m = ind.len();
    let q = qgrid.len();
    let dfts = (0..q)
        .map(|j| rank_dft(ind.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let cutoffs: Vec<usize> = (0..fgrid.len()).map(|ell| fgrid.cutoff(ell, m)).collect();
    let scale = 1.0 / (m as f64 * m as f64);
    let mut surface = SpectralSurface::zeros(*fgrid, qgrid.clone());

    for i in 0..q {
        for j in i..q {
            let (a, b) = (dfts[i].values(), dfts[j].values());
            let mut acc = Complex64::new(0.0, 0.0);
            let mut s = 1;
            for (ell, &cut) in cutoffs.iter().enumerate() {
                while s <= cut {
                    acc += a[s - 1] * b[s - 1].conj();
                    s += 1;
                }
                let mut value = acc * scale;
                if i == j {
                    value.im = 0.0;
                }
                surface.set(ell, i, j, value);
                surface.set(ell, j, i, value.conj());
            }
        }
    }
    Ok(surface)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Direct O(m²) DFT, independent of the FFT path.
    fn dft_oracle(column: &[bool]) -> Vec<Complex64> {
        let m = column.len();
        (1..m)
            .map(|s| {
                column
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(t, _)| Complex64::from_polar(1.0, -2.0 * PI * (s * t) as f64 / m as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn rank_dft_examples() {
        let ones = rank_dft(&[true; 4]).unwrap();
        assert!(ones.values().iter().all(|z| z.norm() == 0.0));
        let zeros = rank_dft(&[false; 5]).unwrap();
        assert!(zeros.values().iter().all(|z| z.norm() == 0.0));
        let d = rank_dft(&[true, false]).unwrap();
        assert_eq!(d.window_len(), 2);
        assert!((d.at(1) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(rank_dft(&[true]).is_err());
    }

    #[test]
    fn rank_dft_matches_direct_sum_and_is_hermitian() {
        let column = [true, false, false, true, true, false, true, false, false];
        let fast = rank_dft(&column).unwrap();
        for (a, b) in fast.values().iter().zip(dft_oracle(&column)) {
            assert!((a - b).norm() < 1e-12);
        }
        let m = column.len();
        for s in 1..m {
            assert!((fast.at(s) - fast.at(m - s).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_dft_is_centering_invariant() {
        // Σ_t c e^{-i2πst/m} = 0 for s ∉ mZ, so subtracting a constant is invisible.
        let column = [true, false, true, true, false, false, false, true];
        let m = column.len();
        let fast = rank_dft(&column).unwrap();
        for shift in [0.125, 0.5, -3.0] {
            for s in 1..m {
                let centred: Complex64 = column
                    .iter()
                    .enumerate()
                    .map(|(t, &b)| {
                        Complex64::from_polar(1.0, -2.0 * PI * (s * t) as f64 / m as f64)
                            * ((b as u8 as f64) - shift)
                    })
                    .sum();
                assert!((centred - fast.at(s)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cr_periodogram_examples() {
        let p = cr_periodogram(&[1.0, 2.0], 0.5, 0.5).unwrap();
        assert!((p[0].re - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((p[0].re - 0.07958).abs() < 1e-5);

        let p = cr_periodogram(&[0.3, 1.0, -2.0, 4.0], 0.2, 0.7).unwrap();
        assert!(p.iter().all(|z| z.norm() == 0.0));

        let p = cr_periodogram(&[0.3, 1.0, -2.0, 4.0, 0.1, 0.9], 0.5, 0.5).unwrap();
        assert!(p.iter().all(|z| z.im == 0.0 && z.re >= 0.0));
    }

    #[test]
    fn surface_basic_properties() {
        let window = [0.3, 1.2, -0.7, 2.2, 0.05, -1.5, 0.8, 1.9, -0.2, 0.4];
        let fgrid = FrequencyGrid::new(8).unwrap();
        let qgrid = QuantileGrid::equispaced(4).unwrap();
        let s = integrated_spectrum(&window, &fgrid, &qgrid).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.get(0, i, j), c(0.0, 0.0));
            }
            for ell in 1..fgrid.len() {
                assert_eq!(s.get(ell, i, i).im, 0.0);
                assert!(s.get(ell, i, i).re >= s.get(ell - 1, i, i).re);
            }
        }
        assert_eq!(s.get(3, 0, 2), s.get(3, 2, 0).conj());
    }

    #[test]
    fn surface_matches_periodogram_sum() {
        let window = [0.3, 1.2, -0.7, 2.2, 0.05, -1.5, 0.8, 1.9, -0.2, 0.4, 3.1];
        let m = window.len();
        let fgrid = FrequencyGrid::new(6).unwrap();
        let qgrid = QuantileGrid::new(vec![0.3, 0.6]).unwrap();
        let s = integrated_spectrum(&window, &fgrid, &qgrid).unwrap();
        let p = cr_periodogram(&window, 0.3, 0.6).unwrap();
        for ell in 0..fgrid.len() {
            let direct: Complex64 = (1..m)
                .filter(|&k| 2.0 * PI * k as f64 / m as f64 <= fgrid.lambda(ell) + 1e-12)
                .map(|k| p[k - 1] * (2.0 * PI / m as f64))
                .sum();
            assert!((direct - s.get(ell, 0, 1)).norm() < 1e-13);
        }
    }

    #[test]
    fn constant_window_gives_zero_surface() {
        let fgrid = FrequencyGrid::new(32).unwrap();
        let qgrid = QuantileGrid::equispaced(8).unwrap();
        let s = integrated_spectrum(&[2.0; 20], &fgrid, &qgrid).unwrap();
        assert!(s.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn part_parsing() {
        assert_eq!("Re".parse::<Part>().unwrap(), Part::Re);
        assert_eq!("im".parse::<Part>().unwrap(), Part::Im);
        assert!("x".parse::<Part>().is_err());
        assert_eq!(Part::Im.of(c(1.0, 2.0)), 2.0);
    }
}
