use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, QuantileGrid};

/// Complex estimate indexed by `(ℓ, i, j)`: frequency `2πℓ/d` and quantile
/// pair `(τ_i, τ_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSurface {
    fgrid: FrequencyGrid,
    qgrid: QuantileGrid,
    values: Vec<Complex64>,
}

pub const CSV_HEADER: &str = "ell,lambda,tau1,tau2,re,im";

impl SpectralSurface {
    pub fn zeros(fgrid: FrequencyGrid, qgrid: QuantileGrid) -> Self {
        let len = fgrid.len() * qgrid.len() * qgrid.len();
        Self {
            fgrid,
            qgrid,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Fills every entry from `f(λ, τ1, τ2)`.
    pub fn from_fn(
        fgrid: FrequencyGrid,
        qgrid: QuantileGrid,
        f: impl Fn(f64, f64, f64) -> Complex64,
    ) -> Self {
        let mut surface = Self::zeros(fgrid, qgrid);
        for ell in 0..fgrid.len() {
            for i in 0..surface.qgrid.len() {
                for j in 0..surface.qgrid.len() {
                    let value = f(
                        fgrid.lambda(ell),
                        surface.qgrid.level(i),
                        surface.qgrid.level(j),
                    );
                    surface.set(ell, i, j, value);
                }
            }
        }
        surface
    }

    pub fn fgrid(&self) -> &FrequencyGrid {
        &self.fgrid
    }

    pub fn qgrid(&self) -> &QuantileGrid {
        &self.qgrid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    fn index(&self, ell: usize, i: usize, j: usize) -> usize {
        let q = self.qgrid.len();
        (ell * q + i) * q + j
    }

    #[inline]
    pub fn get(&self, ell: usize, i: usize, j: usize) -> Complex64 {
        self.values[self.index(ell, i, j)]
    }

    #[inline]
    pub fn set(&mut self, ell: usize, i: usize, j: usize, value: Complex64) {
        let idx = self.index(ell, i, j);
        self.values[idx] = value;
    }

    /// Looks an entry up by quantile values rather than indices.
    pub fn at_levels(&self, ell: usize, tau1: f64, tau2: f64) -> Result<Complex64> {
        let i = self.level_index(tau1)?;
        let j = self.level_index(tau2)?;
        Ok(self.get(ell, i, j))
    }

    pub fn level_index(&self, tau: f64) -> Result<usize> {
        self.qgrid
            .index_of(tau)
            .ok_or_else(|| Error::GridMismatch(format!("quantile level {tau} not on the surface grid")))
    }

    pub fn same_grids(&self, other: &Self) -> bool {
        self.fgrid == other.fgrid && self.qgrid == other.qgrid
    }

    pub fn ensure_same_grids(&self, other: &Self) -> Result<()> {
        if self.same_grids(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "surfaces on different grids (d = {} vs {}, {} vs {} levels)",
                self.fgrid.d(),
                other.fgrid.d(),
                self.qgrid.len(),
                other.qgrid.len()
            )))
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        debug_assert!(self.same_grids(other));
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    /// Long-format CSV: `ell,lambda,tau1,tau2,re,im`, one row per entry.
    ///
    /// Floats use Rust's shortest round-trip formatting, so
    /// [`SpectralSurface::from_csv`] recovers every value bit-for-bit.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 48);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for ell in 0..self.fgrid.len() {
            let lambda = self.fgrid.lambda(ell);
            for (i, &t1) in self.qgrid.levels().iter().enumerate() {
                for (j, &t2) in self.qgrid.levels().iter().enumerate() {
                    let z = self.get(ell, i, j);
                    let _ = writeln!(out, "{ell},{lambda},{t1},{t2},{},{}", z.re, z.im);
                }
            }
        }
        out
    }

    /// Parses [`SpectralSurface::to_csv`] output; `#` comment lines are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut saw_header = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != CSV_HEADER {
                    return Err(Error::Parse(format!(
                        "expected surface header '{CSV_HEADER}', found '{line}'"
                    )));
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(Error::Parse(format!("line {}: expected 6 fields", lineno + 1)));
            }
            let num = |k: usize| -> Result<f64> {
                fields[k]
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let ell = fields[0]
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            rows.push((ell, num(1)?, num(2)?, num(3)?, num(4)?, num(5)?));
        }
        if rows.is_empty() {
            return Err(Error::Parse("surface CSV has no rows".into()));
        }
        let max_ell = rows.iter().map(|r| r.0).max().unwrap_or(0);
        let d = if max_ell == 0 {
            1
        } else {
            let (ell, lambda) = rows
                .iter()
                .find(|r| r.0 == 1)
                .map(|r| (r.0, r.1))
                .ok_or_else(|| Error::Parse("missing ell = 1 rows".into()))?;
            (2.0 * std::f64::consts::PI * ell as f64 / lambda).round() as usize
        };
        let fgrid = FrequencyGrid::new(d)?;
        if fgrid.max_index() != max_ell {
            return Err(Error::Parse(format!(
                "frequency rows (max ell {max_ell}) inconsistent with d = {d}"
            )));
        }
        let mut levels: Vec<f64> = rows.iter().map(|r| r.2).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let qgrid = QuantileGrid::new(levels)?;
        let mut surface = Self::zeros(fgrid, qgrid);
        if rows.len() != surface.values.len() {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                surface.values.len(),
                rows.len()
            )));
        }
        for (ell, lambda, t1, t2, re, im) in rows {
            if lambda.to_bits() != fgrid.lambda(ell).to_bits() {
                return Err(Error::Parse(format!("lambda {lambda} does not match 2π·{ell}/{d}")));
            }
            let i = surface.level_index(t1)?;
            let j = surface.level_index(t2)?;
            surface.set(ell, i, j, Complex64::new(re, im));
        }
        Ok(surface)
    }
}
