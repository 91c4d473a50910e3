//! Quantile and frequency grids.
//!
//! Frequencies are kept as integer pairs `(ℓ, d)` standing for `2πℓ/d`, so
//! membership tests such as `2πs/m ≤ 2πℓ/d` reduce to exact integer
//! comparisons `s·d ≤ ℓ·m`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when looking a quantile level up by value.
const LEVEL_MATCH_TOL: f64 = 1e-12;

/// Strictly increasing quantile levels in the open unit interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct QuantileGrid {
    levels: Vec<f64>,
}

impl QuantileGrid {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidGrid("quantile grid is empty".into()));
        }
        if let Some(&bad) = levels.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::InvalidGrid(format!(
                "quantile level {bad} outside (0, 1)"
            )));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "quantile levels must be strictly increasing".into(),
            ));
        }
        Ok(Self { levels })
    }

    /// Sorts and deduplicates `levels` before validating them.
    pub fn from_unsorted(mut levels: Vec<f64>) -> Result<Self> {
        levels.sort_by(f64::total_cmp);
        levels.dedup_by(|a, b| (*a - *b).abs() <= LEVEL_MATCH_TOL);
        Self::new(levels)
    }

    /// The levels `k/denominator` for `k = 1, ..., denominator - 1`.
    pub fn equispaced(denominator: usize) -> Result<Self> {
        if denominator < 2 {
            return Err(Error::InvalidGrid(format!(
                "equispaced quantile grid needs denominator >= 2, got {denominator}"
            )));
        }
        Self::new(
            (1..denominator)
                .map(|k| k as f64 / denominator as f64)
                .collect(),
        )
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, i: usize) -> f64 {
        self.levels[i]
    }

    pub fn index_of(&self, tau: f64) -> Option<usize> {
        self.levels
            .iter()
            .position(|&t| (t - tau).abs() <= LEVEL_MATCH_TOL)
    }
}

impl TryFrom<Vec<f64>> for QuantileGrid {
    type Error = Error;

    fn try_from(levels: Vec<f64>) -> Result<Self> {
        Self::new(levels)
    }
}

impl From<QuantileGrid> for Vec<f64> {
    fn from(grid: QuantileGrid) -> Self {
        grid.levels
    }
}

/// The frequencies `2πℓ/d` for `ℓ = 0, ..., ⌊d/2⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FrequencyGridRepr", into = "FrequencyGridRepr")]
pub struct FrequencyGrid {
    d: usize,
}

#[derive(Serialize, Deserialize)]
struct FrequencyGridRepr {
    d: usize,
}

impl TryFrom<FrequencyGridRepr> for FrequencyGrid {
    type Error = Error;

    fn try_from(repr: FrequencyGridRepr) -> Result<Self> {
        Self::new(repr.d)
    }
}

impl From<FrequencyGrid> for FrequencyGridRepr {
    fn from(grid: FrequencyGrid) -> Self {
        Self { d: grid.d }
    }
}

impl FrequencyGrid {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidGrid("frequency grid needs d >= 1".into()));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of grid points, `⌊d/2⌋ + 1`.
    pub fn len(&self) -> usize {
        self.d / 2 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest grid index, `⌊d/2⌋`.
    pub fn max_index(&self) -> usize {
        self.d / 2
    }

    pub fn lambda(&self, ell: usize) -> f64 {
        2.0 * PI * ell as f64 / self.d as f64
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|ell| self.lambda(ell))
    }

    /// Largest `s` with `2πs/m ≤ 2πℓ/d`, i.e. `⌊ℓ·m/d⌋`.
    pub fn cutoff(&self, ell: usize, m: usize) -> usize {
        ell * m / self.d
    }

    /// Whether the Fourier frequency `2πs/m` lies in `[0, 2πℓ/d]`.
    pub fn includes(&self, ell: usize, s: usize, m: usize) -> bool {
        s * self.d <= ell * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_grid_validation() {
        assert!(QuantileGrid::new(vec![0.0, 0.5]).is_err());
        assert!(QuantileGrid::new(vec![0.5, 1.0]).is_err());
        assert!(QuantileGrid::new(vec![0.5, 0.5]).is_err());
        assert!(QuantileGrid::new(vec![0.6, 0.5]).is_err());
        assert!(QuantileGrid::new(vec![]).is_err());
        let g = QuantileGrid::from_unsorted(vec![0.75, 0.25, 0.25]).unwrap();
        assert_eq!(g.levels(), &[0.25, 0.75]);
    }

    #[test]
    fn equispaced_levels() {
        let g = QuantileGrid::equispaced(8).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.level(3), 0.5);
        assert_eq!(g.index_of(0.125), Some(0));
        assert_eq!(g.index_of(0.3), None);
    }

    #[test]
    fn frequency_grid_points() {
        let g = FrequencyGrid::new(32).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g.lambda(0), 0.0);
        assert_eq!(g.lambda(16), PI);
        let lambdas: Vec<f64> = g.lambdas().collect();
        assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
        assert!(lambdas.iter().all(|&l| (0.0..=PI).contains(&l)));
        let odd = FrequencyGrid::new(5).unwrap();
        assert_eq!(odd.len(), 3);
        assert!(odd.lambda(2) < PI);
    }

    #[test]
    fn cutoff_is_exact() {
        let g = FrequencyGrid::new(32).unwrap();
        // 2π·64/128 = π exactly equals 2π·16/32.
        assert_eq!(g.cutoff(16, 128), 64);
        assert!(g.includes(16, 64, 128));
        assert!(!g.includes(16, 65, 128));
        // d does not divide m: 2π s/100 ≤ 2π/32 ⇔ s ≤ 3.125.
        assert_eq!(g.cutoff(1, 100), 3);
    }

    #[test]
    fn grids_round_trip_through_json() {
        let q = QuantileGrid::new(vec![0.1, 1.0 / 3.0, 0.7]).unwrap();
        let json = serde_json::to_string(&q).unwrap();
        let back: QuantileGrid = serde_json::from_str(&json).unwrap();
        assert_eq!(q, back);
        for (a, b) in q.levels().iter().zip(back.levels()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let f = FrequencyGrid::new(32).unwrap();
        let back: FrequencyGrid = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(f, back);
        assert!(serde_json::from_str::<QuantileGrid>("[0.5, 0.2]").is_err());
    }
}
