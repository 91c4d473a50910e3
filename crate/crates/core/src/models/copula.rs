//! Bivariate copulas and tabulated conditional distribution functions used
//! to drive the copula Markov chains.
//!
//! A [`CopulaGrid`] stores `P(U ≤ u_g | V ∈ cell_h)` on `G` rows (cells of
//! width `1/G` in `v`) and `G + 1` columns `u_g = g/G`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default grid resolution.
pub const DEFAULT_GRID_SIZE: usize = 1000;

/// `(α, β)` of the asymmetric Gumbel copula.
const ASYM_ALPHA: f64 = 1.0;
const ASYM_BETA: f64 = 0.5;

/// The copula families C1–C6.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CopulaFamily {
    /// C1: asymmetric Gumbel with `(α, β) = (1, 0.5)`, `γ ≥ 1`.
    AsymmetricGumbel { gamma: f64 },
    /// C2: zero total circulation mixture `λ + (1 - λ) c_0`, `λ ∈ [0, 1]`.
    ZeroCirculation { lambda: f64 },
    /// C3: Gumbel, `γ ≥ 1`.
    Gumbel { gamma: f64 },
    /// C4: Clayton, `γ > 0`.
    Clayton { gamma: f64 },
    /// C5: piecewise-uniform copula 3 of Nelsen's Figure 1.
    Nelsen3,
    /// C6: piecewise-uniform copula 6 of Nelsen's Figure 1.
    Nelsen6,
}

/// Gumbel parameter for a given Kendall's tau: `γ = 1/(1 - τ)`.
pub fn gumbel_from_kendall(tau: f64) -> f64 {
    1.0 / (1.0 - tau)
}

/// Clayton parameter for a given Kendall's tau: `γ = 2τ/(1 - τ)`.
pub fn clayton_from_kendall(tau: f64) -> f64 {
    2.0 * tau / (1.0 - tau)
}

impl CopulaFamily {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            CopulaFamily::AsymmetricGumbel { gamma } | CopulaFamily::Gumbel { gamma } => {
                gamma.is_finite() && gamma >= 1.0
            }
            CopulaFamily::ZeroCirculation { lambda } => (0.0..=1.0).contains(&lambda),
            CopulaFamily::Clayton { gamma } => gamma.is_finite() && gamma > 0.0,
            CopulaFamily::Nelsen3 | CopulaFamily::Nelsen6 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("invalid copula parameters {self:?}")))
        }
    }

    /// Closed-form copula `C(u, v)` for C1, C3 and C4.
    fn closed_form(&self, u: f64, v: f64) -> Option<f64> {
        if !matches!(
            self,
            CopulaFamily::AsymmetricGumbel { .. } | CopulaFamily::Gumbel { .. } | CopulaFamily::Clayton { .. }
        ) {
            return None;
        }
        if u <= 0.0 || v <= 0.0 {
            return Some(0.0);
        }
        if u >= 1.0 {
            return Some(v.min(1.0));
        }
        if v >= 1.0 {
            return Some(u);
        }
        Some(match *self {
            CopulaFamily::AsymmetricGumbel { gamma } => {
                let a = (-ASYM_ALPHA * u.ln()).powf(gamma);
                let b = (-ASYM_BETA * v.ln()).powf(gamma);
                u.powf(1.0 - ASYM_ALPHA) * v.powf(1.0 - ASYM_BETA) * (-(a + b).powf(1.0 / gamma)).exp()
            }
            CopulaFamily::Gumbel { gamma } => {
                let s = (-u.ln()).powf(gamma) + (-v.ln()).powf(gamma);
                (-s.powf(1.0 / gamma)).exp()
            }
            CopulaFamily::Clayton { gamma } => {
                (u.powf(-gamma) + v.powf(-gamma) - 1.0).powf(-1.0 / gamma)
            }
            _ => unreachable!(),
        })
    }

    /// For the piecewise-uniform families: the `u`-support of the singular
    /// part in quarter-band `band = ⌊4v⌋`, the density height there, and the
    /// weight of the independence component.
    fn piecewise_row(&self, band: usize) -> Option<PiecewiseRow> {
        match *self {
            CopulaFamily::ZeroCirculation { lambda } => {
                let support = match band {
                    0 => (0.25, 0.5),
                    1 => (0.75, 1.0),
                    2 => (0.0, 0.25),
                    _ => (0.5, 0.75),
                };
                Some((vec![support], 4.0, lambda))
            }
            CopulaFamily::Nelsen3 => {
                let support = match band {
                    0 => vec![(0.0, 0.25), (0.75, 1.0)],
                    1 => vec![(0.5, 1.0)],
                    2 => vec![(0.25, 0.75)],
                    _ => vec![(0.0, 0.5)],
                };
                Some((support, 2.0, 0.0))
            }
            CopulaFamily::Nelsen6 => {
                let support = if band < 2 {
                    vec![(0.25, 0.75)]
                } else {
                    vec![(0.0, 0.25), (0.75, 1.0)]
                };
                Some((support, 2.0, 0.0))
            }
            _ => None,
        }
    }
}

/// Support intervals, density height and independence weight of one band.
type PiecewiseRow = (Vec<(f64, f64)>, f64, f64);

/// Tabulated conditional distribution functions of a copula.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaGrid {
    size: usize,
    /// Row-major, `size` rows of `size + 1` values.
    cdf: Vec<f64>,
}

impl CopulaGrid {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Conditional distribution function row for the `v`-cell `h`.
    pub fn row(&self, h: usize) -> &[f64] {
        &self.cdf[h * (self.size + 1)..(h + 1) * (self.size + 1)]
    }

    /// Row whose cell midpoint is nearest to `v`.
    pub fn row_for(&self, v: f64) -> &[f64] {
        let h = ((v * self.size as f64).floor() as isize).clamp(0, self.size as isize - 1);
        self.row(h as usize)
    }
}

/// Builds the conditional-cdf table of `family` on a `g × (g + 1)` grid.
///
/// Closed-form copulas use the central difference
/// `G·(C(u, v + 1/2G) - C(u, v - 1/2G))` at the cell midpoint `v`; the
/// piecewise-uniform copulas are integrated exactly. Each row is forced to be
/// non-decreasing and rescaled to end at 1.
pub fn build_copula_grid(family: CopulaFamily, g: usize) -> Result<CopulaGrid> {
    family.validate()?;
    if g < 2 {
        return Err(Error::InvalidModel(format!("copula grid size must be >= 2, got {g}")));
    }
    let gf = g as f64;
    let mut cdf = Vec::with_capacity(g * (g + 1));
    for h in 0..g {
        let start = cdf.len();
        let lo = h as f64 / gf;
        let hi = (h + 1) as f64 / gf;
        if let Some((support, height, indep)) = family.piecewise_row(((h as f64 + 0.5) / gf * 4.0) as usize) {
            for k in 0..=g {
                let u = k as f64 / gf;
                let covered: f64 = support
                    .iter()
                    .map(|&(a, b)| (u.min(b) - a).max(0.0))
                    .sum();
                cdf.push(indep * u + (1.0 - indep) * height * covered);
            }
        } else {
            for k in 0..=g {
                let u = k as f64 / gf;
                let upper = family.closed_form(u, hi).expect("closed form");
                let lower = family.closed_form(u, lo).expect("closed form");
                cdf.push((upper - lower) * gf);
            }
        }
        let row = &mut cdf[start..];
        row[0] = 0.0;
        for k in 1..row.len() {
            row[k] = row[k].max(row[k - 1]);
        }
        let last = row[g];
        if last <= 0.0 {
            return Err(Error::InvalidModel(format!("degenerate conditional cdf in row {h}")));
        }
        for x in row.iter_mut() {
            *x = (*x / last).min(1.0);
        }
    }
    Ok(CopulaGrid { size: g, cdf })
}

/// Shared, lazily built grids at [`DEFAULT_GRID_SIZE`].
pub fn cached_grid(family: CopulaFamily) -> Result<Arc<CopulaGrid>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<CopulaGrid>>>> = OnceLock::new();
    let key = format!("{family:?}");
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(grid) = cache.lock().expect("grid cache poisoned").get(&key) {
        return Ok(grid.clone());
    }
    let grid = Arc::new(build_copula_grid(family, DEFAULT_GRID_SIZE)?);
    cache
        .lock()
        .expect("grid cache poisoned")
        .insert(key, grid.clone());
    Ok(grid)
}

/// Generalized inverse on the grid: the smallest `u_g` whose conditional
/// cdf (in the row nearest `v`) reaches `u`, clamped to `[1/G, 1 - 1/G]`.
pub fn conditional_inverse(grid: &CopulaGrid, u: f64, v: f64) -> f64 {
    let row = grid.row_for(v);
    let g = row.partition_point(|&c| c < u).clamp(1, grid.size);
    let gf = grid.size as f64;
    (g as f64 / gf).clamp(1.0 / gf, 1.0 - 1.0 / gf)
}

/// As [`conditional_inverse`] but interpolating linearly inside the grid
/// cell, i.e. the exact inverse of the piecewise-linear conditional cdf.
/// Draws are continuous, so simulated chains are free of ties.
pub fn conditional_inverse_interpolated(grid: &CopulaGrid, u: f64, v: f64) -> f64 {
    let row = grid.row_for(v);
    let g = row.partition_point(|&c| c < u).clamp(1, grid.size);
    let (c0, c1) = (row[g - 1], row[g]);
    let gf = grid.size as f64;
    let frac = if c1 > c0 { ((u - c0) / (c1 - c0)).clamp(0.0, 1.0) } else { 1.0 };
    ((g as f64 - 1.0 + frac) / gf).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}
