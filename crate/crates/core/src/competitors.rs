//! Classical time-reversibility statistics for side-by-side comparison.
//!
//! Each statistic is built from the consecutive pairs `(X_t, X_{t+1})`.
//! Critical values are left to the caller: [`resampling_p_value`] accepts
//! any [`NullResampler`], and [`PermutationResampler`] is supplied for quick
//! sanity checks only. Permuting destroys all serial dependence, so it is
//! not a valid calibration for dependent data; a local bootstrap would have
//! to be supplied through the trait.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CompetitorKind {
    /// `(1/(n-1)) Σ (X_{t+1}² X_t - X_{t+1} X_t²)`
    Rr,
    /// `(1/(n-1)) Σ Δ_t / (1 + Δ_t²)` with `Δ_t = X_{t+1} - X_t`
    Cck,
    /// `(1/(n-1)) Σ I{X_{t+1} > X_t} - 1/2`
    Pp,
    /// `sup_{x,y} |F̂(x, y) - F̂(y, x)|` for the lag-one bivariate ecdf
    Bs,
}

impl CompetitorKind {
    pub const ALL: [CompetitorKind; 4] = [Self::Rr, Self::Cck, Self::Pp, Self::Bs];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rr => "RR",
            Self::Cck => "CCK",
            Self::Pp => "PP",
            Self::Bs => "BS",
        }
    }
}

impl fmt::Display for CompetitorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CompetitorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown competitor '{s}', expected RR, CCK, PP or BS")))
    }
}

/// Evaluates `kind` on `series` (`n ≥ 2`).
pub fn competitor_statistic(kind: CompetitorKind, series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 2 {
        return Err(Error::InvalidSeries(format!(
            "competitor statistics need n >= 2, got {n}"
        )));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidSeries("non-finite value".into()));
    }
    let pairs = series.windows(2).map(|w| (w[0], w[1]));
    let norm = 1.0 / (n - 1) as f64;
    Ok(match kind {
        CompetitorKind::Rr => norm * pairs.map(|(x, y)| y * y * x - y * x * x).sum::<f64>(),
        CompetitorKind::Cck => {
            norm * pairs
                .map(|(x, y)| {
                    let delta = y - x;
                    delta / (1.0 + delta * delta)
                })
                .sum::<f64>()
        }
        CompetitorKind::Pp => norm * pairs.filter(|(x, y)| y > x).count() as f64 - 0.5,
        CompetitorKind::Bs => bivariate_symmetry(series),
    })
}

/// `T_BS` via dense ranks and a 2-D prefix count over the `K × K` grid of
/// distinct values. The empirical field only jumps at observed values, so
/// the supremum is attained on that grid. Time and memory are `O(K²)`.
fn bivariate_symmetry(series: &[f64]) -> f64 {
    let mut distinct = series.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let k = distinct.len();
    let rank = |x: f64| distinct.partition_point(|&v| v < x);
    let mut counts = vec![0u32; k * k];
    for w in series.windows(2) {
        counts[rank(w[0]) * k + rank(w[1])] += 1;
    }
    // counts[a][b] becomes #{t : r(X_t) ≤ a, r(X_{t+1}) ≤ b}.
    for a in 0..k {
        for b in 1..k {
            counts[a * k + b] += counts[a * k + b - 1];
        }
    }
    for a in 1..k {
        for b in 0..k {
            counts[a * k + b] += counts[(a - 1) * k + b];
        }
    }
    let mut best = 0u32;
    for a in 0..k {
        for b in a + 1..k {
            best = best.max(counts[a * k + b].abs_diff(counts[b * k + a]));
        }
    }
    best as f64 / (series.len() - 1) as f64
}

/// Draws a series from some null (time-reversible) distribution that
/// resembles the observed one.
pub trait NullResampler: Sync {
    fn resample(&self, series: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// Random permutation of the observations. Only valid under an i.i.d. null.
#[derive(Debug, Clone, Copy, Default)]
pub struct PermutationResampler;

impl NullResampler for PermutationResampler {
    fn resample(&self, series: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = series.to_vec();
        out.shuffle(rng);
        out
    }
}

/// Two-sided resampling p-value `(1 + #{|T*| ≥ |T|}) / (1 + reps)`.
pub fn resampling_p_value(
    kind: CompetitorKind,
    series: &[f64],
    resampler: &dyn NullResampler,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    if reps == 0 {
        return Err(Error::InvalidConfig("resampling needs reps >= 1".into()));
    }
    let observed = competitor_statistic(kind, series)?.abs();
    let mut rng = stream_rng(seed, 0);
    let mut hits = 0usize;
    for _ in 0..reps {
        let draw = resampler.resample(series, &mut rng);
        if competitor_statistic(kind, &draw)?.abs() >= observed {
            hits += 1;
        }
    }
    Ok((1 + hits) as f64 / (1 + reps) as f64)
}
