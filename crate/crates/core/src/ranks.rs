//! Empirical distribution functions and rank indicator matrices.
//!
//! Ties follow the literal definition `F̂(x) = #{i : X_i ≤ x} / m`, so tied
//! observations share the largest rank of their group.

use crate::error::{Error, Result};
use crate::grid::QuantileGrid;

/// `#{i : X_i ≤ X_t}` for every `t`, computed with one sort.
pub fn rank_counts(window: &[f64]) -> Result<Vec<usize>> {
    if window.is_empty() {
        return Err(Error::Empty("window"));
    }
    let mut order: Vec<usize> = (0..window.len()).collect();
    order.sort_by(|&a, &b| window[a].total_cmp(&window[b]));
    let mut counts = vec![0; window.len()];
    let mut start = 0;
    while start < order.len() {
        let value = window[order[start]];
        let mut end = start + 1;
        while end < order.len() && window[order[end]] == value {
            end += 1;
        }
        for &idx in &order[start..end] {
            counts[idx] = end;
        }
        start = end;
    }
    Ok(counts)
}

/// `F̂(X_t)` for each point of the window, with `F̂` the window's own
/// empirical distribution function. Values lie in `{1/m, ..., 1}`.
pub fn empirical_cdf_at_points(window: &[f64]) -> Result<Vec<f64>> {
    let m = window.len() as f64;
    Ok(rank_counts(window)?
        .into_iter()
        .map(|c| c as f64 / m)
        .collect())
}

/// Number of observations that share their value with another one.
pub fn tie_count(values: &[f64]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if j - i > 1 {
            ties += j - i;
        }
        i = j;
    }
    ties
}

/// Binary matrix `I{F̂(X_t) ≤ τ_j}` over one window, stored column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorMatrix {
    bits: Vec<bool>,
    len: usize,
    levels: usize,
    start: usize,
}

impl IndicatorMatrix {
    /// Window length `m` (number of rows).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `(start, length)` of the window this matrix was built from.
    pub fn window(&self) -> (usize, usize) {
        (self.start, self.len)
    }

    pub fn bit(&self, t: usize, j: usize) -> bool {
        self.bits[j * self.len + t]
    }

    pub fn column(&self, j: usize) -> &[bool] {
        &self.bits[j * self.len..(j + 1) * self.len]
    }

    pub fn column_sum(&self, j: usize) -> usize {
        self.column(j).iter().filter(|&&b| b).count()
    }
}

/// Builds the indicator matrix of `window` against every level of `grid`.
pub fn indicator_matrix(window: &[f64], grid: &QuantileGrid) -> Result<IndicatorMatrix> {
    indicator_matrix_at(window, 0, grid)
}

/// As [`indicator_matrix`], recording that the window starts at `start`.
pub fn indicator_matrix_at(
    window: &[f64],
    start: usize,
    grid: &QuantileGrid,
) -> Result<IndicatorMatrix> {
    let counts = rank_counts(window)?;
    let m = window.len();
    let mut bits = Vec::with_capacity(m * grid.len());
    for &tau in grid.levels() {
        bits.extend(counts.iter().map(|&c| c as f64 / m as f64 <= tau));
    }
    Ok(IndicatorMatrix {
        bits,
        len: m,
        levels: grid.len(),
        start,
    })
}
