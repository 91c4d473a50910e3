use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranks;

/// An observed (or simulated) real-valued time series `X_0, ..., X_{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealSeries {
    values: Vec<f64>,
}

impl RealSeries {
    /// Wraps `values`, rejecting empty input and non-finite entries.
    ///
    /// Ties are accepted but logged: the rank-based estimators assume a
    /// continuous marginal distribution.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("series"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value {} at index {pos}",
                values[pos]
            )));
        }
        let ties = ranks::tie_count(&values);
        if ties > 0 {
            log::warn!(
                "series contains {ties} tied observations; rank-based estimates assume a continuous marginal"
            );
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The subsample `X_start, ..., X_{start+len-1}`.
    pub fn window(&self, start: usize, len: usize) -> Result<&[f64]> {
        if len == 0 || start + len > self.values.len() {
            return Err(Error::WindowOutOfRange {
                start,
                n: self.values.len(),
                b: len,
            });
        }
        Ok(&self.values[start..start + len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }

    /// Applies `f` elementwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&x| f(x)).collect())
    }
}

impl TryFrom<Vec<f64>> for RealSeries {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<RealSeries> for Vec<f64> {
    fn from(series: RealSeries) -> Self {
        series.values
    }
}
