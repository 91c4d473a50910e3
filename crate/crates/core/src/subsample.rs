//! Sliding-window subsampling: window estimates, the `D`/`E` deviation
//! statistics, empirical quantiles and confidence bands.
//!
//! Windows start at `t = 0, ..., n - b`. Every window uses its own empirical
//! distribution function, and the full-sample and window estimates are
//! compared on the common frequency grid `2πℓ/d`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::InferenceConfig;
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, QuantileGrid};
use crate::inference::WeightFunction;
use crate::series::RealSeries;
use crate::spectrum::{integrated_spectrum, Part, SpectralSurface};

/// Window statistics `√b·D̃_{n,b,t}` or `√b·Ẽ_{n,b,t}`, one per start `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleDistribution {
    stats: Vec<f64>,
    b: usize,
    n: usize,
    fpc: bool,
}

impl SubsampleDistribution {
    pub fn new(stats: Vec<f64>, b: usize, n: usize, fpc: bool) -> Result<Self> {
        if b == 0 || b > n {
            return Err(Error::InvalidConfig(format!("block length {b} not in 1..={n}")));
        }
        if stats.len() != n - b + 1 {
            return Err(Error::InvalidConfig(format!(
                "expected {} window statistics, got {}",
                n - b + 1,
                stats.len()
            )));
        }
        if let Some(bad) = stats.iter().find(|s| s.is_nan() || **s < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "window statistics must be non-negative, got {bad}"
            )));
        }
        Ok(Self { stats, b, n, fpc })
    }

    pub fn stats(&self) -> &[f64] {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fpc(&self) -> bool {
        self.fpc
    }

    /// `inf{x : L(x) ≥ level}`, see [`empirical_quantile`].
    pub fn quantile(&self, level: f64) -> Result<f64> {
        empirical_quantile(&self.stats, level)
    }
}

/// The factor `(1 - b/n)^{-1/2}` when `fpc` is set, else 1.
///
/// At `b = n` the only window is the sample itself and the correction is
/// undefined; the factor is then 1.
pub fn fpc_factor(b: usize, n: usize, fpc: bool) -> f64 {
    if fpc && b < n {
        (1.0 - b as f64 / n as f64).powf(-0.5)
    } else {
        1.0
    }
}

fn check_window(n: usize, b: usize, t: usize) -> Result<()> {
    if b < 2 || b > n || t > n - b {
        return Err(Error::WindowOutOfRange { start: t, n, b });
    }
    Ok(())
}

/// Estimate computed from `X_t, ..., X_{t+b-1}` alone.
pub fn subsample_surface(
    series: &[f64],
    b: usize,
    t: usize,
    fgrid: &FrequencyGrid,
    qgrid: &QuantileGrid,
) -> Result<SpectralSurface> {
    check_window(series.len(), b, t)?;
    integrated_spectrum(&series[t..t + b], fgrid, qgrid)
}

/// Applies `f(t, surface_t)` to every window surface, in parallel, and
/// returns the results ordered by `t`.
pub fn map_windows<T, F>(
    series: &[f64],
    b: usize,
    fgrid: &FrequencyGrid,
    qgrid: &QuantileGrid,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &SpectralSurface) -> Result<T> + Sync,
{
    let n = series.len();
    check_window(n, b, 0)?;
    (0..=n - b)
        .into_par_iter()
        .map(|t| {
            let surface = integrated_spectrum(&series[t..t + b], fgrid, qgrid)?;
            f(t, &surface)
        })
        .collect()
}

/// `max_ℓ |part(sub) - part(full)|` at the levels `(i, j)`.
fn max_deviation(sub: &SpectralSurface, full: &SpectralSurface, part: Part, i: usize, j: usize) -> f64 {
    (0..sub.fgrid().len())
        .map(|ell| (part.of(sub.get(ell, i, j)) - part.of(full.get(ell, i, j))).abs())
        .fold(0.0, f64::max)
}

/// `D̃ = (1 - b/n)^{-1/2} max_ℓ |part F̂_{n,b,t}(λ_ℓ) - part F̂_n(λ_ℓ)|`, the
/// factor applied only when `fpc` is set.
#[allow(clippy::too_many_arguments)]
pub fn d_statistic(
    sub: &SpectralSurface,
    full: &SpectralSurface,
    part: Part,
    tau1: f64,
    tau2: f64,
    fpc: bool,
    b: usize,
    n: usize,
) -> Result<f64> {
    sub.ensure_same_grids(full)?;
    let (i, j) = (sub.level_index(tau1)?, sub.level_index(tau2)?);
    let dev = max_deviation(sub, full, part, i, j);
    Ok(if dev == 0.0 { 0.0 } else { dev * fpc_factor(b, n, fpc) })
}

/// `Ẽ = max over pairs of D̃(τ1, τ2) / s(τ1, τ2)`.
#[allow(clippy::too_many_arguments)]
pub fn e_statistic(
    sub: &SpectralSurface,
    full: &SpectralSurface,
    part: Part,
    pairs: &[(f64, f64)],
    weight: WeightFunction,
    fpc: bool,
    b: usize,
    n: usize,
) -> Result<f64> {
    let weights = pairs
        .iter()
        .map(|&(t1, t2)| weight.eval(t1, t2))
        .collect::<Result<Vec<_>>>()?;
    e_statistic_weighted(sub, full, part, pairs, &weights, fpc, b, n)
}

/// [`e_statistic`] with explicit per-pair weights.
#[allow(clippy::too_many_arguments)]
pub fn e_statistic_weighted(
    sub: &SpectralSurface,
    full: &SpectralSurface,
    part: Part,
    pairs: &[(f64, f64)],
    weights: &[f64],
    fpc: bool,
    b: usize,
    n: usize,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Empty("quantile pair set"));
    }
    if weights.len() != pairs.len() {
        return Err(Error::InvalidWeight(format!(
            "{} weights for {} pairs",
            weights.len(),
            pairs.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidWeight(format!("weights must be positive, got {w}")));
    }
    sub.ensure_same_grids(full)?;
    let mut best: f64 = 0.0;
    for (&(t1, t2), &w) in pairs.iter().zip(weights) {
        let (i, j) = (sub.level_index(t1)?, sub.level_index(t2)?);
        best = best.max(max_deviation(sub, full, part, i, j) / w);
    }
    Ok(if best == 0.0 { 0.0 } else { best * fpc_factor(b, n, fpc) })
}

/// Smallest `x` among `stats` with `#{stats ≤ x} / len ≥ level`: the order
/// statistic of rank `⌈level · len⌉`.
///
/// A relative slack of `1e-12` in the ceiling keeps products such as
/// `0.95 · 20` from landing one rank too high through rounding.
pub fn empirical_quantile(stats: &[f64], level: f64) -> Result<f64> {
    if stats.is_empty() {
        return Err(Error::Empty("subsample distribution"));
    }
    if !(level > 0.0 && level <= 1.0) {
        return Err(Error::InvalidConfig(format!("quantile level {level} not in (0, 1]")));
    }
    let len = stats.len();
    let target = level * len as f64;
    let rank = ((target - target * 1e-12).ceil() as usize).clamp(1, len);
    let mut sorted = stats.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[rank - 1])
}

/// One interval `center ± half_width` of a band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    pub ell: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub center: f64,
    pub half_width: f64,
}

impl BandPoint {
    pub fn lower(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower() <= value && value <= self.upper()
    }
}

/// Subsampling confidence band for the real or imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBand {
    pub fgrid: FrequencyGrid,
    pub part: Part,
    /// `C_{D,α}` or `C_{E,α}`.
    pub critical_value: f64,
    pub points: Vec<BandPoint>,
    pub distribution: SubsampleDistribution,
}

pub const BAND_CSV_HEADER: &str = "ell,lambda,tau1,tau2,part,lower,upper,center";

impl ConfidenceBand {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 64);
        out.push_str(BAND_CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.ell,
                self.fgrid.lambda(p.ell),
                p.tau1,
                p.tau2,
                self.part.as_str(),
                p.lower(),
                p.upper(),
                p.center
            );
        }
        out
    }

    /// Distinct quantile pairs covered by the band, in first-seen order.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for p in &self.points {
            if !pairs.contains(&(p.tau1, p.tau2)) {
                pairs.push((p.tau1, p.tau2));
            }
        }
        pairs
    }
}

fn band_inputs(series: &RealSeries, cfg: &InferenceConfig) -> Result<FrequencyGrid> {
    cfg.validate(series.len())?;
    cfg.frequency_grid()
}

/// Band uniform in `λ` for fixed `(τ1, τ2)`: half-width
/// `C_{D,α} = n^{-1/2} q_{1-α}(√b·D̃)` around the full-sample estimate.
pub fn band_d(
    series: &RealSeries,
    cfg: &InferenceConfig,
    part: Part,
    tau1: f64,
    tau2: f64,
) -> Result<ConfidenceBand> {
    let fgrid = band_inputs(series, cfg)?;
    let qgrid = QuantileGrid::from_unsorted(vec![tau1, tau2])?;
    let x = series.values();
    let (n, b) = (x.len(), cfg.b);
    let full = integrated_spectrum(x, &fgrid, &qgrid)?;
    let sqrt_b = (b as f64).sqrt();
    let stats = map_windows(x, b, &fgrid, &qgrid, |_, sub| {
        Ok(sqrt_b * d_statistic(sub, &full, part, tau1, tau2, cfg.fpc, b, n)?)
    })?;
    let distribution = SubsampleDistribution::new(stats, b, n, cfg.fpc)?;
    let critical_value = distribution.quantile(1.0 - cfg.alpha)? / (n as f64).sqrt();
    let (i, j) = (full.level_index(tau1)?, full.level_index(tau2)?);
    let points = (0..fgrid.len())
        .map(|ell| BandPoint {
            ell,
            tau1,
            tau2,
            center: part.of(full.get(ell, i, j)),
            half_width: critical_value,
        })
        .collect();
    Ok(ConfidenceBand {
        fgrid,
        part,
        critical_value,
        points,
        distribution,
    })
}

/// Band uniform in `(λ, τ1, τ2)` over `pairs`: half-width `C_{E,α}·s(τ1, τ2)`.
pub fn band_e(
    series: &RealSeries,
    cfg: &InferenceConfig,
    part: Part,
    pairs: &[(f64, f64)],
) -> Result<ConfidenceBand> {
    if pairs.is_empty() {
        return Err(Error::Empty("quantile pair set"));
    }
    let fgrid = band_inputs(series, cfg)?;
    let qgrid = QuantileGrid::from_unsorted(pairs.iter().flat_map(|&(a, b)| [a, b]).collect())?;
    let weights = pairs
        .iter()
        .map(|&(t1, t2)| cfg.weight.eval(t1, t2))
        .collect::<Result<Vec<_>>>()?;
    let x = series.values();
    let (n, b) = (x.len(), cfg.b);
    let full = integrated_spectrum(x, &fgrid, &qgrid)?;
    let sqrt_b = (b as f64).sqrt();
    let stats = map_windows(x, b, &fgrid, &qgrid, |_, sub| {
        Ok(sqrt_b * e_statistic_weighted(sub, &full, part, pairs, &weights, cfg.fpc, b, n)?)
    })?;
    let distribution = SubsampleDistribution::new(stats, b, n, cfg.fpc)?;
    let critical_value = distribution.quantile(1.0 - cfg.alpha)? / (n as f64).sqrt();
    let mut points = Vec::with_capacity(pairs.len() * fgrid.len());
    for (&(tau1, tau2), &w) in pairs.iter().zip(&weights) {
        let (i, j) = (full.level_index(tau1)?, full.level_index(tau2)?);
        points.extend((0..fgrid.len()).map(|ell| BandPoint {
            ell,
            tau1,
            tau2,
            center: part.of(full.get(ell, i, j)),
            half_width: critical_value * w,
        }));
    }
    Ok(ConfidenceBand {
        fgrid,
        part,
        critical_value,
        points,
        distribution,
    })
}

/// Which band points a coverage event must include.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum CoverageMode {
    /// Every `λ_ℓ` at one quantile pair.
    Pointwise { tau1: f64, tau2: f64 },
    /// Every point of the band.
    Uniform,
}

/// Whether `truth` lies inside `band` at every point required by `mode`.
///
/// `truth` may live on a finer grid `2πk/N`; the band frequency `2πℓ/d` is
/// then compared with the truth at `k = ⌊Nℓ/d⌋`.
pub fn coverage_indicator(
    band: &ConfidenceBand,
    truth: &SpectralSurface,
    mode: CoverageMode,
) -> Result<bool> {
    let (d, big_n) = (band.fgrid.d(), truth.fgrid().d());
    if big_n < d {
        return Err(Error::GridMismatch(format!(
            "truth grid N = {big_n} is coarser than band grid d = {d}"
        )));
    }
    let mut checked = 0usize;
    for p in &band.points {
        if let CoverageMode::Pointwise { tau1, tau2 } = mode {
            if (p.tau1 - tau1).abs() > 1e-12 || (p.tau2 - tau2).abs() > 1e-12 {
                continue;
            }
        }
        let k = big_n * p.ell / d;
        let value = band.part.of(truth.at_levels(k, p.tau1, p.tau2)?);
        checked += 1;
        if !p.contains(value) {
            return Ok(false);
        }
    }
    if checked == 0 {
        return Err(Error::GridMismatch("band has no points at the requested pair".into()));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::iid_truth_surface;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn series(values: &[f64]) -> RealSeries {
        RealSeries::new(values.to_vec()).unwrap()
    }

    fn lcg(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect()
    }

    fn cfg(n: usize, b: usize) -> InferenceConfig {
        let mut c = InferenceConfig::for_length(64.max(n)).unwrap();
        c.b = b;
        c
    }

    #[test]
    fn window_range_is_checked() {
        let x = lcg(10, 1);
        let f = FrequencyGrid::new(4).unwrap();
        let q = QuantileGrid::new(vec![0.5]).unwrap();
        assert!(subsample_surface(&x, 4, 6, &f, &q).is_ok());
        assert_eq!(
            subsample_surface(&x, 4, 7, &f, &q),
            Err(Error::WindowOutOfRange { start: 7, n: 10, b: 4 })
        );
        assert!(subsample_surface(&x, 11, 0, &f, &q).is_err());
    }

    #[test]
    fn full_window_matches_full_sample() {
        let x = lcg(37, 2);
        let f = FrequencyGrid::new(8).unwrap();
        let q = QuantileGrid::equispaced(4).unwrap();
        assert_eq!(
            subsample_surface(&x, 37, 0, &f, &q).unwrap(),
            integrated_spectrum(&x, &f, &q).unwrap()
        );
    }

    #[test]
    fn two_point_window_at_pi() {
        // (1/m²)|d(1)|² with d(1) = 1 for window [1, 2] at τ = 0.5.
        let f = FrequencyGrid::new(2).unwrap();
        let q = QuantileGrid::new(vec![0.5]).unwrap();
        let s = subsample_surface(&[5.0, 1.0, 2.0], 2, 1, &f, &q).unwrap();
        assert!((s.get(1, 0, 0).re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn d_statistic_examples() {
        let f = FrequencyGrid::new(2).unwrap();
        let q = QuantileGrid::new(vec![0.5]).unwrap();
        let full = SpectralSurface::zeros(f, q.clone());
        let mut sub = full.clone();
        sub.set(1, 0, 0, Complex64::new(0.3, 0.0));
        assert_eq!(d_statistic(&full, &full, Part::Re, 0.5, 0.5, true, 4, 16).unwrap(), 0.0);
        let off = d_statistic(&sub, &full, Part::Re, 0.5, 0.5, false, 4, 16).unwrap();
        assert_eq!(off, 0.3);
        let on = d_statistic(&sub, &full, Part::Re, 0.5, 0.5, true, 4, 16).unwrap();
        assert!((on / off - (0.75f64).powf(-0.5)).abs() < 1e-15);
        assert_eq!(d_statistic(&full, &sub, Part::Re, 0.5, 0.5, false, 4, 16).unwrap(), 0.3);
        let other = SpectralSurface::zeros(FrequencyGrid::new(4).unwrap(), q);
        assert!(matches!(
            d_statistic(&sub, &other, Part::Re, 0.5, 0.5, false, 4, 16),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn e_statistic_examples() {
        let f = FrequencyGrid::new(2).unwrap();
        let q = QuantileGrid::new(vec![0.25, 0.5]).unwrap();
        let full = SpectralSurface::zeros(f, q.clone());
        let mut sub = full.clone();
        sub.set(1, 0, 0, Complex64::new(0.2, 0.0));
        sub.set(1, 1, 1, Complex64::new(0.5, 0.0));
        let pairs = [(0.25, 0.25), (0.5, 0.5)];
        let e = e_statistic_weighted(&sub, &full, Part::Re, &pairs, &[1.0, 2.0], false, 4, 16).unwrap();
        assert!((e - 0.25).abs() < 1e-15);
        let single = e_statistic(&sub, &full, Part::Re, &pairs[..1], WeightFunction::S4, true, 4, 16).unwrap();
        let d = d_statistic(&sub, &full, Part::Re, 0.25, 0.25, true, 4, 16).unwrap();
        assert_eq!(single, d);
        assert_eq!(e_statistic(&full, &full, Part::Re, &pairs, WeightFunction::S1, true, 4, 16).unwrap(), 0.0);
        assert!(e_statistic_weighted(&sub, &full, Part::Re, &pairs, &[1.0, 0.0], false, 4, 16).is_err());
        assert!(e_statistic(&sub, &full, Part::Re, &[(0.0, 0.5)], WeightFunction::S1, false, 4, 16).is_err());
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(empirical_quantile(&[4.0, 2.0, 1.0, 3.0], 0.75).unwrap(), 3.0);
        assert_eq!(empirical_quantile(&[2.5; 7], 0.1).unwrap(), 2.5);
        assert_eq!(empirical_quantile(&[5.0], 0.95).unwrap(), 5.0);
        assert_eq!(empirical_quantile(&[1.0, 9.0, 3.0], 1.0).unwrap(), 9.0);
        let twenty: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(empirical_quantile(&twenty, 0.95).unwrap(), 19.0);
        assert!(empirical_quantile(&[], 0.5).is_err());
        assert!(empirical_quantile(&[1.0], 0.0).is_err());
    }

    #[test]
    fn constant_series_has_degenerate_bands() {
        let x = series(&[3.0; 64]);
        let band = band_d(&x, &cfg(64, 16), Part::Re, 0.5, 0.5).unwrap();
        assert_eq!(band.critical_value, 0.0);
        assert!(band.points.iter().all(|p| p.center == 0.0 && p.half_width == 0.0));
    }

    #[test]
    fn block_equal_to_n_is_degenerate() {
        let x = series(&lcg(64, 3));
        let band = band_d(&x, &cfg(64, 64), Part::Im, 0.25, 0.75).unwrap();
        assert_eq!(band.distribution.stats(), &[0.0]);
        assert_eq!(band.critical_value, 0.0);
        let band = band_e(&x, &cfg(64, 64), Part::Re, &[(0.25, 0.5), (0.5, 0.5)]).unwrap();
        assert_eq!(band.critical_value, 0.0);
    }

    #[test]
    fn smallest_level_picks_minimum_statistic() {
        let x = series(&lcg(80, 4));
        let mut c = cfg(80, 32);
        c.alpha = 1.0 - 1.0 / 49.0;
        let band = band_d(&x, &c, Part::Re, 0.5, 0.5).unwrap();
        let min = band.distribution.stats().iter().copied().fold(f64::INFINITY, f64::min);
        assert!((band.critical_value - min / 80f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_pair_e_band_equals_d_band() {
        let x = series(&lcg(100, 5));
        let c = cfg(100, 32);
        let d = band_d(&x, &c, Part::Re, 0.25, 0.5).unwrap();
        let e = band_e(&x, &c, Part::Re, &[(0.25, 0.5)]).unwrap();
        assert_eq!(d.points, e.points);
        assert_eq!(d.distribution, e.distribution);
    }

    #[test]
    fn e_band_widths_follow_weights() {
        let x = series(&lcg(100, 6));
        let mut c = cfg(100, 32);
        c.weight = WeightFunction::S1;
        let pairs = [(0.25, 0.25), (0.5, 0.5), (0.25, 0.75)];
        let band = band_e(&x, &c, Part::Re, &pairs).unwrap();
        for p in &band.points {
            let w = WeightFunction::S1.eval(p.tau1, p.tau2).unwrap();
            assert!((p.half_width - band.critical_value * w).abs() < 1e-15);
        }
        c.weight = WeightFunction::S4;
        let flat = band_e(&x, &c, Part::Re, &pairs).unwrap();
        assert!(flat.points.iter().all(|p| p.half_width == flat.critical_value));
    }

    #[test]
    fn coverage_examples() {
        let f = FrequencyGrid::new(8).unwrap();
        let q = QuantileGrid::new(vec![0.5]).unwrap();
        let truth = iid_truth_surface(&f, &q);
        let dist = SubsampleDistribution::new(vec![0.0], 4, 4, true).unwrap();
        let mut band = ConfidenceBand {
            fgrid: f,
            part: Part::Re,
            critical_value: 0.01,
            points: (0..f.len())
                .map(|ell| BandPoint {
                    ell,
                    tau1: 0.5,
                    tau2: 0.5,
                    center: truth.get(ell, 0, 0).re,
                    half_width: 0.01,
                })
                .collect(),
            distribution: dist,
        };
        let mode = CoverageMode::Pointwise { tau1: 0.5, tau2: 0.5 };
        assert!(coverage_indicator(&band, &truth, mode).unwrap());
        assert!(coverage_indicator(&band, &truth, CoverageMode::Uniform).unwrap());
        for p in &mut band.points {
            p.center += 0.5;
            p.half_width = 0.0;
        }
        assert!(!coverage_indicator(&band, &truth, mode).unwrap());
        let coarse = iid_truth_surface(&FrequencyGrid::new(4).unwrap(), &q);
        assert!(coverage_indicator(&band, &coarse, mode).is_err());
    }

    #[test]
    fn coverage_rounds_frequencies_down() {
        // ℓ = 1 on d = 3 sits at 2π/3; on N = 8 the truth is read at k = 2.
        let q = QuantileGrid::new(vec![0.5]).unwrap();
        let fine = FrequencyGrid::new(8).unwrap();
        let truth = SpectralSurface::from_fn(fine, q.clone(), |lambda, _, _| Complex64::new(lambda, 0.0));
        let f = FrequencyGrid::new(3).unwrap();
        let point = |ell: usize, center: f64| BandPoint { ell, tau1: 0.5, tau2: 0.5, center, half_width: 1e-12 };
        let band = ConfidenceBand {
            fgrid: f,
            part: Part::Re,
            critical_value: 1e-12,
            points: vec![point(0, 0.0), point(1, fine.lambda(2))],
            distribution: SubsampleDistribution::new(vec![0.0], 2, 2, false).unwrap(),
        };
        assert!(coverage_indicator(&band, &truth, CoverageMode::Uniform).unwrap());
    }

    #[test]
    fn band_csv_shape() {
        let x = series(&lcg(64, 7));
        let band = band_d(&x, &cfg(64, 16), Part::Im, 0.25, 0.5).unwrap();
        let csv = band.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], BAND_CSV_HEADER);
        assert_eq!(lines.len(), 1 + 17);
        assert!(lines[1].contains(",im,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn quantile_is_order_statistic_and_monotone(
            stats in prop::collection::vec(0.0f64..10.0, 1..60),
            a in 0.01f64..1.0,
            b in 0.01f64..1.0,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let q_lo = empirical_quantile(&stats, lo).unwrap();
            let q_hi = empirical_quantile(&stats, hi).unwrap();
            prop_assert!(q_lo <= q_hi);
            // Definition: smallest x in stats with L(x) >= level.
            let len = stats.len() as f64;
            let frac = |x: f64| stats.iter().filter(|&&s| s <= x).count() as f64 / len;
            let oracle = stats
                .iter()
                .copied()
                .filter(|&x| frac(x) >= hi - 1e-12)
                .fold(f64::INFINITY, f64::min);
            prop_assert_eq!(q_hi, oracle);
            let max = stats.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(empirical_quantile(&stats, 1.0).unwrap(), max);
        }
    }
}
