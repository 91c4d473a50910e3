//! Weight functions and the subsampling tests for time-reversibility (TR)
//! and pairwise tail symmetry (EQ).
//!
//! Both statistics are maxima over a finite set `S_n` of points
//! `(λ_ℓ, τ1, τ2)`; p-values are the fraction of window statistics that
//! strictly exceed the full-sample statistic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::InferenceConfig;
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, QuantileGrid};
use crate::series::RealSeries;
use crate::spectrum::{integrated_spectrum, SpectralSurface};
use crate::subsample::{fpc_factor, map_windows};

/// Weight `s(τ1, τ2)` dividing deviations inside uniform maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightFunction {
    /// `√(τ1(1-τ1)τ2(1-τ2))`
    S1,
    /// `max(τ1, τ2) - τ1τ2`
    S2,
    /// `min(τ1, τ2) - τ1τ2`
    S3,
    /// `1`
    S4,
    /// `√s3`
    S5,
}

impl WeightFunction {
    pub const ALL: [WeightFunction; 5] = [Self::S1, Self::S2, Self::S3, Self::S4, Self::S5];

    /// Evaluates the weight; levels must lie strictly inside `(0, 1)`.
    pub fn eval(self, tau1: f64, tau2: f64) -> Result<f64> {
        for tau in [tau1, tau2] {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::InvalidWeight(format!(
                    "weight {self} needs levels in (0, 1), got {tau}"
                )));
            }
        }
        let s3 = tau1.min(tau2) - tau1 * tau2;
        Ok(match self {
            Self::S1 => (tau1 * (1.0 - tau1) * tau2 * (1.0 - tau2)).sqrt(),
            Self::S2 => tau1.max(tau2) - tau1 * tau2,
            Self::S3 => s3,
            Self::S4 => 1.0,
            Self::S5 => s3.sqrt(),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::S1 => "s1",
            Self::S2 => "s2",
            Self::S3 => "s3",
            Self::S4 => "s4",
            Self::S5 => "s5",
        }
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown weight '{s}', expected s1..s5")))
    }
}

/// One point `(λ_ℓ, τ1, τ2)` of a test grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub ell: usize,
    pub tau1: f64,
    pub tau2: f64,
}

/// The finite set `S_n` over which a test statistic is maximized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestGrid {
    fgrid: FrequencyGrid,
    points: Vec<GridPoint>,
}

impl TestGrid {
    pub fn new(fgrid: FrequencyGrid, points: Vec<GridPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("test grid"));
        }
        for p in &points {
            if p.ell > fgrid.max_index() {
                return Err(Error::InvalidGrid(format!(
                    "frequency index {} beyond ⌊d/2⌋ = {}",
                    p.ell,
                    fgrid.max_index()
                )));
            }
            for tau in [p.tau1, p.tau2] {
                if !(tau > 0.0 && tau < 1.0) {
                    return Err(Error::InvalidGrid(format!("level {tau} not in (0, 1)")));
                }
            }
        }
        Ok(Self { fgrid, points })
    }

    /// All combinations of the frequency indices `ells` with ordered pairs
    /// drawn from `levels`.
    pub fn product(fgrid: FrequencyGrid, ells: &[usize], levels: &[f64]) -> Result<Self> {
        let mut points = Vec::with_capacity(ells.len() * levels.len() * levels.len());
        for &ell in ells {
            for &tau1 in levels {
                for &tau2 in levels {
                    points.push(GridPoint { ell, tau1, tau2 });
                }
            }
        }
        Self::new(fgrid, points)
    }

    pub fn fgrid(&self) -> &FrequencyGrid {
        &self.fgrid
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The distinct levels used by the grid.
    pub fn levels(&self) -> Result<QuantileGrid> {
        QuantileGrid::from_unsorted(self.points.iter().flat_map(|p| [p.tau1, p.tau2]).collect())
    }

    /// The grid levels together with their reflections `1 - τ`.
    fn levels_with_reflections(&self) -> Result<QuantileGrid> {
        QuantileGrid::from_unsorted(
            self.points
                .iter()
                .flat_map(|p| [p.tau1, p.tau2, 1.0 - p.tau1, 1.0 - p.tau2])
                .collect(),
        )
    }
}

/// TR grid: `ℓ = 0, ..., ⌊d/2⌋` and levels `k/qstep`, `k = 1, ..., qstep-1`.
pub fn default_grid_tr(d: usize, qstep: usize) -> Result<TestGrid> {
    let fgrid = FrequencyGrid::new(d)?;
    let levels = QuantileGrid::equispaced(qstep)?;
    let ells: Vec<usize> = (0..fgrid.len()).collect();
    TestGrid::product(fgrid, &ells, levels.levels())
}

/// EQ grid: `ℓ = 0, ..., ⌊d/2⌋` and levels `k/16`, `k = 2, 3, 4`.
pub fn default_grid_eq(d: usize) -> Result<TestGrid> {
    let fgrid = FrequencyGrid::new(d)?;
    let ells: Vec<usize> = (0..fgrid.len()).collect();
    TestGrid::product(fgrid, &ells, &[2.0 / 16.0, 3.0 / 16.0, 4.0 / 16.0])
}

/// Which subsampled TR statistic calibrates `p_TR`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrVariant {
    /// `√b max |Im F̂_{n,b,t}| / s`.
    #[default]
    Tr1,
    /// `√b max |Im F̂_{n,b,t} - Im F̂_n| / s`.
    Tr2,
}

/// Outcome of a subsampling test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: String,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub b: usize,
    pub d: usize,
    pub weight: WeightFunction,
    pub fpc: bool,
    pub grid_size: usize,
    pub alpha: f64,
    /// `p_value < alpha`.
    pub reject: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variant: Option<TrVariant>,
    /// The points of `S_n`; not serialized.
    #[serde(skip, default)]
    pub grid: Vec<GridPoint>,
}

/// Grid points resolved to surface indices with their weights.
struct Resolved {
    idx: Vec<(usize, usize, usize)>,
    mirror: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

fn resolve(grid: &TestGrid, qgrid: &QuantileGrid, weight: WeightFunction, eq: bool) -> Result<Resolved> {
    let find = |tau: f64| {
        qgrid
            .index_of(tau)
            .ok_or_else(|| Error::GridMismatch(format!("level {tau} missing from surface grid")))
    };
    let mut out = Resolved {
        idx: Vec::with_capacity(grid.len()),
        mirror: Vec::new(),
        weights: Vec::with_capacity(grid.len()),
    };
    for p in grid.points() {
        out.idx.push((p.ell, find(p.tau1)?, find(p.tau2)?));
        if eq {
            out.mirror.push((find(1.0 - p.tau1)?, find(1.0 - p.tau2)?));
        }
        out.weights.push(weight.eval(p.tau1, p.tau2)?);
    }
    Ok(out)
}

/// `max |Im F̂ - Im reference| / s` over the grid (`reference = 0` for TR1).
fn tr_max(surface: &SpectralSurface, r: &Resolved, reference: Option<&SpectralSurface>) -> f64 {
    r.idx
        .iter()
        .zip(&r.weights)
        .map(|(&(ell, i, j), &w)| {
            let base = reference.map_or(0.0, |f| f.get(ell, i, j).im);
            (surface.get(ell, i, j).im - base).abs() / w
        })
        .fold(0.0, f64::max)
}

/// `max |F̂(λ, τ1, τ2) - F̂(λ, 1-τ1, 1-τ2)| / s` with the complex modulus.
fn eq_max(surface: &SpectralSurface, r: &Resolved) -> f64 {
    r.idx
        .iter()
        .zip(&r.mirror)
        .zip(&r.weights)
        .map(|((&(ell, i, j), &(mi, mj)), &w)| (surface.get(ell, i, j) - surface.get(ell, mi, mj)).norm() / w)
        .fold(0.0, f64::max)
}

fn check_eq_grid(grid: &TestGrid) -> Result<()> {
    if let Some(p) = grid.points().iter().find(|p| p.tau1 > 0.5 || p.tau2 > 0.5) {
        return Err(Error::InvalidGrid(format!(
            "tail-symmetry grid needs levels <= 1/2, got ({}, {})",
            p.tau1, p.tau2
        )));
    }
    Ok(())
}

fn check_window(n: usize, b: usize, t: usize) -> Result<()> {
    if b < 2 || b > n || t > n - b {
        return Err(Error::WindowOutOfRange { start: t, n, b });
    }
    Ok(())
}

/// `T_TR = √n max_{S_n} |Im F̂_n(λ, τ1, τ2)| / s(τ1, τ2)`.
pub fn t_tr(series: &RealSeries, grid: &TestGrid, weight: WeightFunction) -> Result<f64> {
    let qgrid = grid.levels()?;
    let r = resolve(grid, &qgrid, weight, false)?;
    let surface = integrated_spectrum(series.values(), grid.fgrid(), &qgrid)?;
    Ok((series.len() as f64).sqrt() * tr_max(&surface, &r, None))
}

/// Window statistic `√b max |Im F̂_{n,b,t}| / s`, times `(1 - b/n)^{-1/2}`
/// when `fpc` is set.
pub fn t_tr_sub(
    series: &RealSeries,
    b: usize,
    t: usize,
    grid: &TestGrid,
    weight: WeightFunction,
    fpc: bool,
) -> Result<f64> {
    let n = series.len();
    check_window(n, b, t)?;
    let qgrid = grid.levels()?;
    let r = resolve(grid, &qgrid, weight, false)?;
    let surface = integrated_spectrum(&series.values()[t..t + b], grid.fgrid(), &qgrid)?;
    Ok((b as f64).sqrt() * tr_max(&surface, &r, None) * fpc_factor(b, n, fpc))
}

/// Fraction of window statistics strictly above `statistic`.
fn exceedance(window_stats: &[f64], statistic: f64) -> f64 {
    window_stats.iter().filter(|&&s| s > statistic).count() as f64 / window_stats.len() as f64
}

fn check_cfg(series: &RealSeries, cfg: &InferenceConfig, grid: &TestGrid) -> Result<()> {
    cfg.validate(series.len())?;
    if grid.fgrid().d() != cfg.d {
        return Err(Error::GridMismatch(format!(
            "test grid uses d = {} but the configuration says d = {}",
            grid.fgrid().d(),
            cfg.d
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn report(
    test: &str,
    statistic: f64,
    p_value: f64,
    series: &RealSeries,
    cfg: &InferenceConfig,
    grid: &TestGrid,
    variant: Option<TrVariant>,
) -> TestReport {
    TestReport {
        test: test.to_string(),
        statistic,
        p_value,
        n: series.len(),
        b: cfg.b,
        d: cfg.d,
        weight: cfg.weight,
        fpc: cfg.fpc,
        grid_size: grid.len(),
        alpha: cfg.alpha,
        reject: p_value < cfg.alpha,
        variant,
        grid: grid.points().to_vec(),
    }
}

/// Subsampling time-reversibility test with the TR1 window statistic.
pub fn p_tr(series: &RealSeries, cfg: &InferenceConfig, grid: &TestGrid) -> Result<TestReport> {
    p_tr_variant(series, cfg, grid, TrVariant::Tr1)
}

pub fn p_tr_variant(
    series: &RealSeries,
    cfg: &InferenceConfig,
    grid: &TestGrid,
    variant: TrVariant,
) -> Result<TestReport> {
    check_cfg(series, cfg, grid)?;
    let qgrid = grid.levels()?;
    let r = resolve(grid, &qgrid, cfg.weight, false)?;
    let x = series.values();
    let (n, b) = (x.len(), cfg.b);
    let full = integrated_spectrum(x, grid.fgrid(), &qgrid)?;
    let statistic = (n as f64).sqrt() * tr_max(&full, &r, None);
    let scale = (b as f64).sqrt() * fpc_factor(b, n, cfg.fpc);
    let reference = match variant {
        TrVariant::Tr1 => None,
        TrVariant::Tr2 => Some(&full),
    };
    let stats = map_windows(x, b, grid.fgrid(), &qgrid, |_, sub| Ok(scale * tr_max(sub, &r, reference)))?;
    let p = exceedance(&stats, statistic);
    Ok(report("tr", statistic, p, series, cfg, grid, Some(variant)))
}

/// `T_EQ = √n max_{S_n} |F̂(λ, τ1, τ2) - F̂(λ, 1-τ1, 1-τ2)| / s(τ1, τ2)`.
pub fn t_eq(series: &RealSeries, grid: &TestGrid, weight: WeightFunction) -> Result<f64> {
    check_eq_grid(grid)?;
    let qgrid = grid.levels_with_reflections()?;
    let r = resolve(grid, &qgrid, weight, true)?;
    let surface = integrated_spectrum(series.values(), grid.fgrid(), &qgrid)?;
    Ok((series.len() as f64).sqrt() * eq_max(&surface, &r))
}

pub fn t_eq_sub(
    series: &RealSeries,
    b: usize,
    t: usize,
    grid: &TestGrid,
    weight: WeightFunction,
    fpc: bool,
) -> Result<f64> {
    check_eq_grid(grid)?;
    let n = series.len();
    check_window(n, b, t)?;
    let qgrid = grid.levels_with_reflections()?;
    let r = resolve(grid, &qgrid, weight, true)?;
    let surface = integrated_spectrum(&series.values()[t..t + b], grid.fgrid(), &qgrid)?;
    Ok((b as f64).sqrt() * eq_max(&surface, &r) * fpc_factor(b, n, fpc))
}

/// Subsampling test for pairwise tail symmetry.
pub fn p_eq(series: &RealSeries, cfg: &InferenceConfig, grid: &TestGrid) -> Result<TestReport> {
    check_eq_grid(grid)?;
    check_cfg(series, cfg, grid)?;
    let qgrid = grid.levels_with_reflections()?;
    let r = resolve(grid, &qgrid, cfg.weight, true)?;
    let x = series.values();
    let (n, b) = (x.len(), cfg.b);
    let full = integrated_spectrum(x, grid.fgrid(), &qgrid)?;
    let statistic = (n as f64).sqrt() * eq_max(&full, &r);
    let scale = (b as f64).sqrt() * fpc_factor(b, n, cfg.fpc);
    let stats = map_windows(x, b, grid.fgrid(), &qgrid, |_, sub| Ok(scale * eq_max(sub, &r)))?;
    let p = exceedance(&stats, statistic);
    Ok(report("eq", statistic, p, series, cfg, grid, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn lcg(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed ^ 0x9E37_79B9_7F4A_7C15;
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect()
    }

    fn series(v: Vec<f64>) -> RealSeries {
        RealSeries::new(v).unwrap()
    }

    /// Direct evaluation: double-loop ecdf, double-loop DFT, no FFT.
    fn brute_surface_value(x: &[f64], d: usize, ell: usize, tau1: f64, tau2: f64) -> Complex64 {
        let m = x.len();
        let ind = |tau: f64| -> Vec<f64> {
            x.iter()
                .map(|&xt| {
                    let f = x.iter().filter(|&&xi| xi <= xt).count() as f64 / m as f64;
                    if f <= tau { 1.0 } else { 0.0 }
                })
                .collect()
        };
        let (i1, i2) = (ind(tau1), ind(tau2));
        let dft = |v: &[f64], s: usize| -> Complex64 {
            v.iter()
                .enumerate()
                .map(|(t, &a)| a * Complex64::from_polar(1.0, -2.0 * PI * (s * t) as f64 / m as f64))
                .sum()
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 1..m {
            if 2.0 * PI * s as f64 / m as f64 <= 2.0 * PI * ell as f64 / d as f64 + 1e-12 {
                acc += dft(&i1, s) * dft(&i2, s).conj();
            }
        }
        acc / (m * m) as f64
    }

    #[test]
    fn weight_examples() {
        assert_eq!(WeightFunction::S1.eval(0.5, 0.5).unwrap(), 0.25);
        assert_eq!(WeightFunction::S3.eval(0.25, 0.5).unwrap(), 0.125);
        assert!((WeightFunction::S5.eval(0.25, 0.5).unwrap() - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert_eq!(WeightFunction::S2.eval(0.25, 0.5).unwrap(), 0.375);
        assert_eq!(WeightFunction::S4.eval(0.1, 0.9).unwrap(), 1.0);
        for w in WeightFunction::ALL {
            assert!(w.eval(0.0, 0.5).is_err());
            assert!(w.eval(0.5, 1.0).is_err());
            assert_eq!(w.as_str().parse::<WeightFunction>().unwrap(), w);
        }
        assert!("s6".parse::<WeightFunction>().is_err());
        assert_eq!(serde_json::to_string(&WeightFunction::S3).unwrap(), "\"s3\"");
    }

    #[test]
    fn default_grid_sizes() {
        assert_eq!(default_grid_tr(32, 8).unwrap().len(), 833);
        assert_eq!(default_grid_tr(32, 2).unwrap().len(), 17);
        assert_eq!(default_grid_tr(2, 8).unwrap().len(), 98);
        assert_eq!(default_grid_eq(32).unwrap().len(), 153);
        let f = FrequencyGrid::new(32).unwrap();
        assert_eq!(TestGrid::product(f, &[3], &[0.125, 0.1875, 0.25]).unwrap().len(), 9);
        let ells: Vec<usize> = (0..17).collect();
        assert_eq!(TestGrid::product(f, &ells, &[0.25]).unwrap().len(), 17);
        assert!(TestGrid::product(f, &[17], &[0.25]).is_err());
        assert!(TestGrid::product(f, &[], &[0.25]).is_err());
    }

    #[test]
    fn tr_statistic_degenerate_grids() {
        let x = series(lcg(40, 1));
        let f = FrequencyGrid::new(32).unwrap();
        let ells: Vec<usize> = (0..17).collect();
        let levels = [0.25, 0.5, 0.75];
        let diag: Vec<GridPoint> = ells
            .iter()
            .flat_map(|&ell| levels.iter().map(move |&t| GridPoint { ell, tau1: t, tau2: t }))
            .collect();
        assert_eq!(t_tr(&x, &TestGrid::new(f, diag).unwrap(), WeightFunction::S1).unwrap(), 0.0);
        let zero = TestGrid::product(f, &[0], &levels).unwrap();
        assert_eq!(t_tr(&x, &zero, WeightFunction::S4).unwrap(), 0.0);
    }

    #[test]
    fn tr_statistic_matches_brute_force() {
        for seed in 0..5 {
            let v = lcg(16, seed);
            let grid = default_grid_tr(32, 8).unwrap();
            for w in WeightFunction::ALL {
                let fast = t_tr(&series(v.clone()), &grid, w).unwrap();
                let slow = grid
                    .points()
                    .iter()
                    .map(|p| {
                        brute_surface_value(&v, 32, p.ell, p.tau1, p.tau2).im.abs()
                            / w.eval(p.tau1, p.tau2).unwrap()
                    })
                    .fold(0.0, f64::max)
                    * 4.0;
                assert!((fast - slow).abs() <= 1e-10 * slow.max(1.0), "{fast} vs {slow}");
            }
        }
    }

    #[test]
    fn eq_statistic_matches_brute_force() {
        for seed in 10..15 {
            let v = lcg(16, seed);
            let grid = default_grid_eq(32).unwrap();
            let fast = t_eq(&series(v.clone()), &grid, WeightFunction::S1).unwrap();
            let slow = grid
                .points()
                .iter()
                .map(|p| {
                    let a = brute_surface_value(&v, 32, p.ell, p.tau1, p.tau2);
                    let b = brute_surface_value(&v, 32, p.ell, 1.0 - p.tau1, 1.0 - p.tau2);
                    (a - b).norm() / WeightFunction::S1.eval(p.tau1, p.tau2).unwrap()
                })
                .fold(0.0, f64::max)
                * 4.0;
            assert!((fast - slow).abs() <= 1e-10 * slow.max(1.0));
        }
    }

    #[test]
    fn eq_statistic_degenerate_and_invalid() {
        let x = series(lcg(48, 2));
        let f = FrequencyGrid::new(32).unwrap();
        let ells: Vec<usize> = (0..17).collect();
        let half = TestGrid::product(f, &ells, &[0.5]).unwrap();
        assert_eq!(t_eq(&x, &half, WeightFunction::S4).unwrap(), 0.0);
        let zero = TestGrid::product(f, &[0], &[0.125, 0.25]).unwrap();
        assert_eq!(t_eq(&x, &zero, WeightFunction::S4).unwrap(), 0.0);
        let high = TestGrid::product(f, &[1], &[0.75]).unwrap();
        assert!(matches!(t_eq(&x, &high, WeightFunction::S4), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn eq_statistic_is_negation_invariant() {
        // n a multiple of 16 keeps every grid level on a rank boundary.
        for seed in 0..20 {
            let v = lcg(64, seed);
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let grid = default_grid_eq(32).unwrap();
            let a = t_eq(&series(v), &grid, WeightFunction::S3).unwrap();
            let b = t_eq(&series(neg), &grid, WeightFunction::S3).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn window_statistics() {
        let x = series(lcg(64, 3));
        let grid = default_grid_tr(32, 8).unwrap();
        let full = t_tr(&x, &grid, WeightFunction::S4).unwrap();
        assert_eq!(t_tr_sub(&x, 64, 0, &grid, WeightFunction::S4, false).unwrap(), full);
        let off = t_tr_sub(&x, 16, 5, &grid, WeightFunction::S4, false).unwrap();
        let on = t_tr_sub(&x, 16, 5, &grid, WeightFunction::S4, true).unwrap();
        assert!((on / off - (0.75f64).powf(-0.5)).abs() < 1e-14);
        assert!(t_tr_sub(&x, 16, 49, &grid, WeightFunction::S4, true).is_err());
        let flat = series([vec![1.0; 16], lcg(48, 4)].concat());
        assert_eq!(t_tr_sub(&flat, 16, 0, &grid, WeightFunction::S4, true).unwrap(), 0.0);
        let eq = default_grid_eq(32).unwrap();
        let e_off = t_eq_sub(&x, 32, 3, &eq, WeightFunction::S4, false).unwrap();
        let e_on = t_eq_sub(&x, 32, 3, &eq, WeightFunction::S4, true).unwrap();
        assert!((e_on / e_off - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn p_values_degenerate_cases() {
        let x = series(lcg(64, 5));
        let mut cfg = InferenceConfig::for_length(64).unwrap();
        cfg.b = 64;
        let report = p_tr(&x, &cfg, &default_grid_tr(32, 8).unwrap()).unwrap();
        assert_eq!(report.p_value, 0.0);
        let report = p_eq(&x, &cfg, &default_grid_eq(32).unwrap()).unwrap();
        assert_eq!(report.p_value, 0.0);
        let constant = series(vec![2.0; 64]);
        cfg.b = 32;
        let report = p_tr(&constant, &cfg, &default_grid_tr(32, 8).unwrap()).unwrap();
        assert_eq!((report.statistic, report.p_value), (0.0, 0.0));
    }

    #[test]
    fn p_value_matches_window_loop() {
        let x = series(lcg(96, 6));
        let mut cfg = InferenceConfig::for_length(96).unwrap();
        cfg.b = 32;
        let grid = default_grid_tr(32, 4).unwrap();
        let report = p_tr(&x, &cfg, &grid).unwrap();
        let windows: Vec<f64> = (0..=64)
            .map(|t| t_tr_sub(&x, 32, t, &grid, cfg.weight, true).unwrap())
            .collect();
        let expected = windows.iter().filter(|&&s| s > report.statistic).count() as f64 / 65.0;
        assert_eq!(report.p_value, expected);
        assert_eq!(report.grid_size, 17 * 9);
        cfg.fpc = false;
        let without = p_tr(&x, &cfg, &grid).unwrap();
        assert!(without.p_value <= report.p_value);
        let tr2 = p_tr_variant(&x, &cfg, &grid, TrVariant::Tr2).unwrap();
        assert!((0.0..=1.0).contains(&tr2.p_value));
        let json = serde_json::to_value(&report).unwrap();
        for key in ["statistic", "p_value", "n", "b", "d", "weight", "fpc", "grid_size"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn config_grid_mismatch_is_reported() {
        let x = series(lcg(64, 7));
        let cfg = InferenceConfig::for_length(64).unwrap();
        assert!(matches!(
            p_tr(&x, &cfg, &default_grid_tr(16, 8).unwrap()),
            Err(Error::GridMismatch(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn statistics_are_rank_invariant(seed in any::<u64>(), shift in -5.0f64..5.0, scale in 0.1f64..10.0) {
            let v = lcg(40, seed);
            let t: Vec<f64> = v.iter().map(|x| (scale * x + shift).exp()).collect();
            let tr = default_grid_tr(32, 8).unwrap();
            let eq = default_grid_eq(32).unwrap();
            prop_assert_eq!(
                t_tr(&series(v.clone()), &tr, WeightFunction::S2).unwrap(),
                t_tr(&series(t.clone()), &tr, WeightFunction::S2).unwrap()
            );
            prop_assert_eq!(
                t_eq(&series(v), &eq, WeightFunction::S2).unwrap(),
                t_eq(&series(t), &eq, WeightFunction::S2).unwrap()
            );
        }

        #[test]
        fn weights_positive_inside_unit_square(a in 1e-6f64..(1.0 - 1e-6), b in 1e-6f64..(1.0 - 1e-6)) {
            for w in WeightFunction::ALL {
                let v = w.eval(a, b).unwrap();
                prop_assert!(v > 0.0 && v <= 1.0);
            }
        }
    }
}
