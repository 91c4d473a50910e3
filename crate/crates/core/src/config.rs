use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, QuantileGrid};
use crate::inference::WeightFunction;

/// Default number of frequency grid cells.
pub const DEFAULT_D: usize = 32;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Rule-of-thumb subsampling block length:
/// `max{2^j : 2^j ≤ 2 n^{2/3}, j = 4, ..., 8}`.
///
/// The comparison is done as `2^{3j} ≤ 8 n²` in integers, so values such as
/// `n = 512` (where `2 n^{2/3}` is exactly 128) do not depend on rounding.
pub fn rule_of_thumb_block(n: usize) -> Result<usize> {
    if n < 32 {
        return Err(Error::SeriesTooShort(n));
    }
    let bound = 8 * (n as u128) * (n as u128);
    let j = (4..=8u32)
        .rev()
        .find(|&j| 1u128 << (3 * j) <= bound)
        .expect("n >= 32 always admits j = 4");
    Ok(1usize << j)
}

/// Settings shared by the subsampling bands and tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    /// Subsampling block length.
    pub b: usize,
    /// Frequency grid size; the grid is `2πℓ/d`, `ℓ = 0..=⌊d/2⌋`.
    pub d: usize,
    pub alpha: f64,
    /// Apply the finite-population correction `(1 - b/n)^{-1/2}`.
    pub fpc: bool,
    pub weight: WeightFunction,
    pub quantile_grid: QuantileGrid,
    pub seed: u64,
}

impl InferenceConfig {
    /// Defaults for a series of length `n`: rule-of-thumb `b`, `d = 32`,
    /// `α = 0.05`, correction on, equal weights and levels `k/8`.
    pub fn for_length(n: usize) -> Result<Self> {
        Ok(Self {
            b: rule_of_thumb_block(n)?,
            d: DEFAULT_D,
            alpha: DEFAULT_ALPHA,
            fpc: true,
            weight: WeightFunction::S4,
            quantile_grid: QuantileGrid::equispaced(8)?,
            seed: 0,
        })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.b < 2 || self.b > n {
            return Err(Error::InvalidConfig(format!(
                "block length b = {} must satisfy 1 < b <= n = {n}",
                self.b
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha = {} must lie in (0, 1)",
                self.alpha
            )));
        }
        if self.d < 2 {
            return Err(Error::InvalidConfig(format!("d = {} must be >= 2", self.d)));
        }
        Ok(())
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_rule_matches_published_sequence() {
        let ns = [100, 128, 200, 256, 400, 512, 700, 1024];
        let bs: Vec<usize> = ns.iter().map(|&n| rule_of_thumb_block(n).unwrap()).collect();
        assert_eq!(bs, vec![32, 32, 64, 64, 64, 128, 128, 128]);
    }

    #[test]
    fn block_rule_caps_at_256() {
        assert_eq!(rule_of_thumb_block(1 << 30).unwrap(), 256);
        assert_eq!(rule_of_thumb_block(32).unwrap(), 16);
    }

    #[test]
    fn block_rule_rejects_short_series() {
        assert_eq!(rule_of_thumb_block(31), Err(Error::SeriesTooShort(31)));
    }

    #[test]
    fn block_rule_is_monotone() {
        let mut prev = 0;
        for n in 32..5000 {
            let b = rule_of_thumb_block(n).unwrap();
            assert!(b >= prev && b <= 256);
            prev = b;
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = InferenceConfig::for_length(512).unwrap();
        assert_eq!(cfg.b, 128);
        assert!(cfg.validate(512).is_ok());
        assert!(cfg.validate(100).is_err());
        cfg.alpha = 1.0;
        assert!(cfg.validate(512).is_err());
        cfg.alpha = 0.05;
        cfg.d = 1;
        assert!(cfg.validate(512).is_err());
    }
}
