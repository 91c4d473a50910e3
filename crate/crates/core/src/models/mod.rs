//! Simulation models M0–M15.
//!
//! Recursive models and copula chains discard [`BURN_IN`] initial steps.
//! Start values: `X_{-1} = 0` (AR, QAR, ARCH), `σ²_{-1} = 0.1` (GARCH
//! unconditional variance), `ln σ²_{-1} = 0.5` (EGARCH) and `V_0 = 0.5` for
//! the copula chains.

mod copula;

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

pub use copula::{
    build_copula_grid, cached_grid, clayton_from_kendall, conditional_inverse,
    conditional_inverse_interpolated, gumbel_from_kendall, CopulaFamily, CopulaGrid,
    DEFAULT_GRID_SIZE,
};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::series::RealSeries;

pub const BURN_IN: usize = 1000;

/// AR coefficients of M6a–c and M7a–c.
pub const AR_LADDER: [f64; 3] = [0.3, 0.5, 0.7];
/// `γ^{-1}` for M8/M10 and `λ` for M9/M11, variants a–g.
pub const DEPENDENCE_LADDER: [f64; 7] = [0.15, 0.29, 0.43, 0.57, 0.71, 0.85, 0.99];
/// Kendall's tau of M12a–c and M13a–c.
pub const KENDALL_LADDER: [f64; 3] = [0.25, 0.5, 0.75];

const LADDER_TOL: f64 = 1e-12;

/// One of the simulation models, with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    /// M0: i.i.d. standard normal.
    IidGaussian,
    /// M1: `X_t = 0.1 Φ^{-1}(U_t) + 1.9 (U_t - 0.5) X_{t-1}`.
    Qar,
    /// M2: `X_t = -0.36 X_{t-2} + ε_t`.
    Ar2,
    /// M3: `X_t = (1/1.9 + 0.9 X_{t-1}²)^{1/2} ε_t`.
    Arch,
    /// M4: `σ_t² = 0.01 + 0.4 X_{t-1}² + 0.5 σ_{t-1}²`.
    Garch,
    /// M5: `ln σ_t² = 0.1 + 0.21(|ε_{t-1}| - E|ε|) - 0.2 ε_{t-1} + 0.8 ln σ_{t-1}²`.
    Egarch,
    /// M6: Gaussian AR(1).
    ArGaussian { phi: f64 },
    /// M7: AR(1) with standard Cauchy innovations.
    ArCauchy { phi: f64 },
    /// M8: Markov chain driven by the asymmetric Gumbel copula C1.
    AsymGumbelChain { gamma: f64 },
    /// M9: Markov chain driven by the zero total circulation copula C2.
    ZeroCirculationChain { lambda: f64 },
    /// M10: two independent M8 chains interleaved.
    InterleavedAsymGumbel { gamma: f64 },
    /// M11: two independent M9 chains interleaved.
    InterleavedZeroCirculation { lambda: f64 },
    /// M12: Gumbel copula chain, parameterized by Kendall's tau.
    GumbelChain { kendall: f64 },
    /// M13: Clayton copula chain, parameterized by Kendall's tau.
    ClaytonChain { kendall: f64 },
    /// M14: chain driven by Nelsen's copula 3 (C5).
    Nelsen3Chain,
    /// M15: chain driven by Nelsen's copula 6 (C6).
    Nelsen6Chain,
}

fn ladder_letter(ladder: &[f64], value: f64) -> Option<char> {
    ladder
        .iter()
        .position(|&x| (x - value).abs() <= LADDER_TOL)
        .map(|i| (b'a' + i as u8) as char)
}

fn ladder_value(ladder: &[f64], letter: char) -> Option<f64> {
    let idx = (letter as u8).checked_sub(b'a')? as usize;
    ladder.get(idx).copied()
}

impl ModelSpec {
    /// Family label `M0`–`M15`.
    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::IidGaussian => "M0",
            ModelSpec::Qar => "M1",
            ModelSpec::Ar2 => "M2",
            ModelSpec::Arch => "M3",
            ModelSpec::Garch => "M4",
            ModelSpec::Egarch => "M5",
            ModelSpec::ArGaussian { .. } => "M6",
            ModelSpec::ArCauchy { .. } => "M7",
            ModelSpec::AsymGumbelChain { .. } => "M8",
            ModelSpec::ZeroCirculationChain { .. } => "M9",
            ModelSpec::InterleavedAsymGumbel { .. } => "M10",
            ModelSpec::InterleavedZeroCirculation { .. } => "M11",
            ModelSpec::GumbelChain { .. } => "M12",
            ModelSpec::ClaytonChain { .. } => "M13",
            ModelSpec::Nelsen3Chain => "M14",
            ModelSpec::Nelsen6Chain => "M15",
        }
    }

    /// The free parameter, in the units used by `M..[x]` names, and the
    /// ladder of published variants it is matched against.
    fn parameter(&self) -> Option<(f64, &'static [f64], f64)> {
        match *self {
            ModelSpec::ArGaussian { phi } | ModelSpec::ArCauchy { phi } => Some((phi, &AR_LADDER, phi)),
            ModelSpec::AsymGumbelChain { gamma } | ModelSpec::InterleavedAsymGumbel { gamma } => {
                Some((gamma, &DEPENDENCE_LADDER, 1.0 / gamma))
            }
            ModelSpec::ZeroCirculationChain { lambda }
            | ModelSpec::InterleavedZeroCirculation { lambda } => {
                Some((lambda, &DEPENDENCE_LADDER, lambda))
            }
            ModelSpec::GumbelChain { kendall } | ModelSpec::ClaytonChain { kendall } => {
                Some((kendall, &KENDALL_LADDER, kendall))
            }
            _ => None,
        }
    }

    /// Catalog name such as `M8c`; parameters off the published ladders are
    /// written `M6[0.4]`.
    pub fn name(&self) -> String {
        match self.parameter() {
            None => self.family().to_string(),
            Some((raw, ladder, key)) => match ladder_letter(ladder, key) {
                Some(letter) => format!("{}{letter}", self.family()),
                None => format!("{}[{raw}]", self.family()),
            },
        }
    }

    /// Parses `M0`–`M15` names, ladder variants (`M8c`) and explicit
    /// parameters (`M6[0.4]`, `M8[2.5]` for `γ`, `M13[0.6]` for Kendall's tau).
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        let bad = || Error::InvalidModel(format!("unknown model '{name}'"));
        let rest = name.strip_prefix(['M', 'm']).ok_or_else(bad)?;
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        let family: u32 = digits.parse().map_err(|_| bad())?;
        let suffix = &rest[digits.len()..];

        let param = if suffix.is_empty() {
            None
        } else if let Some(inner) = suffix.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            Some(Param::Explicit(inner.trim().parse::<f64>().map_err(|_| bad())?))
        } else {
            let mut chars = suffix.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => Some(Param::Letter(c)),
                _ => return Err(bad()),
            }
        };

        let lookup = |ladder: &[f64], explicit_map: fn(f64) -> f64, letter_map: fn(f64) -> f64| -> Result<f64> {
            match param {
                Some(Param::Letter(c)) => ladder_value(ladder, c).map(letter_map).ok_or_else(bad),
                Some(Param::Explicit(x)) => Ok(explicit_map(x)),
                None => Err(Error::InvalidModel(format!("model '{name}' needs a variant letter or [parameter]"))),
            }
        };
        let id = |x: f64| x;
        let inv = |x: f64| 1.0 / x;

        let spec = match family {
            0..=5 | 14 | 15 if param.is_some() => return Err(bad()),
            0 => ModelSpec::IidGaussian,
            1 => ModelSpec::Qar,
            2 => ModelSpec::Ar2,
            3 => ModelSpec::Arch,
            4 => ModelSpec::Garch,
            5 => ModelSpec::Egarch,
            6 => ModelSpec::ArGaussian { phi: lookup(&AR_LADDER, id, id)? },
            7 => ModelSpec::ArCauchy { phi: lookup(&AR_LADDER, id, id)? },
            8 => ModelSpec::AsymGumbelChain { gamma: lookup(&DEPENDENCE_LADDER, id, inv)? },
            9 => ModelSpec::ZeroCirculationChain { lambda: lookup(&DEPENDENCE_LADDER, id, id)? },
            10 => ModelSpec::InterleavedAsymGumbel { gamma: lookup(&DEPENDENCE_LADDER, id, inv)? },
            11 => ModelSpec::InterleavedZeroCirculation { lambda: lookup(&DEPENDENCE_LADDER, id, id)? },
            12 => ModelSpec::GumbelChain { kendall: lookup(&KENDALL_LADDER, id, id)? },
            13 => ModelSpec::ClaytonChain { kendall: lookup(&KENDALL_LADDER, id, id)? },
            14 => ModelSpec::Nelsen3Chain,
            15 => ModelSpec::Nelsen6Chain,
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ModelSpec::ArGaussian { phi } | ModelSpec::ArCauchy { phi } => phi.abs() < 1.0,
            ModelSpec::GumbelChain { kendall } => (0.0..1.0).contains(&kendall),
            ModelSpec::ClaytonChain { kendall } => kendall > 0.0 && kendall < 1.0,
            _ => true,
        };
        if !ok {
            return Err(Error::InvalidModel(format!("parameter out of range for {self:?}")));
        }
        if let Some(c) = self.copula() {
            c.validate()?;
        }
        Ok(())
    }

    /// The copula driving a Markov-chain model.
    pub fn copula(&self) -> Option<CopulaFamily> {
        match *self {
            ModelSpec::AsymGumbelChain { gamma } | ModelSpec::InterleavedAsymGumbel { gamma } => {
                Some(CopulaFamily::AsymmetricGumbel { gamma })
            }
            ModelSpec::ZeroCirculationChain { lambda }
            | ModelSpec::InterleavedZeroCirculation { lambda } => {
                Some(CopulaFamily::ZeroCirculation { lambda })
            }
            ModelSpec::GumbelChain { kendall } => Some(CopulaFamily::Gumbel {
                gamma: gumbel_from_kendall(kendall),
            }),
            ModelSpec::ClaytonChain { kendall } => Some(CopulaFamily::Clayton {
                gamma: clayton_from_kendall(kendall),
            }),
            ModelSpec::Nelsen3Chain => Some(CopulaFamily::Nelsen3),
            ModelSpec::Nelsen6Chain => Some(CopulaFamily::Nelsen6),
            _ => None,
        }
    }

    /// Draws `n` observations from the random stream `(seed, stream)`.
    pub fn generate(&self, n: usize, seed: u64, stream: u64) -> Result<RealSeries> {
        let mut rng = stream_rng(seed, stream);
        self.generate_with(n, &mut rng)
    }

    pub fn generate_with(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<RealSeries> {
        if n == 0 {
            return Err(Error::InvalidConfig("cannot generate an empty series".into()));
        }
        self.validate()?;
        let values = match *self {
            ModelSpec::IidGaussian => (0..n).map(|_| normal(rng)).collect(),
            ModelSpec::Qar => qar(n, rng),
            ModelSpec::Ar2 => recursive(n, rng, [0.0, 0.0], |[x1, x2], rng| {
                let x = -0.36 * x2 + normal(rng);
                (x, [x, x1])
            }),
            ModelSpec::Arch => recursive(n, rng, 0.0, |x1: f64, rng| {
                let x = (1.0 / 1.9 + 0.9 * x1 * x1).sqrt() * normal(rng);
                (x, x)
            }),
            ModelSpec::Garch => recursive(n, rng, (0.0, 0.1), |(x1, s1): (f64, f64), rng| {
                let s = 0.01 + 0.4 * x1 * x1 + 0.5 * s1;
                let x = s.sqrt() * normal(rng);
                (x, (x, s))
            }),
            ModelSpec::Egarch => egarch(n, rng),
            ModelSpec::ArGaussian { phi } => recursive(n, rng, 0.0, |x1: f64, rng| {
                let x = phi * x1 + normal(rng);
                (x, x)
            }),
            ModelSpec::ArCauchy { phi } => recursive(n, rng, 0.0, |x1: f64, rng| {
                let x = phi * x1 + cauchy(rng);
                (x, x)
            }),
            ModelSpec::InterleavedAsymGumbel { .. } | ModelSpec::InterleavedZeroCirculation { .. } => {
                let grid = cached_grid(self.copula().expect("copula model"))?;
                let first = copula_chain(&grid, n.div_ceil(2), rng);
                let second = copula_chain(&grid, n / 2, rng);
                let mut out = Vec::with_capacity(n);
                for k in 0..first.len() {
                    out.push(first[k]);
                    if k < second.len() {
                        out.push(second[k]);
                    }
                }
                out
            }
            _ => {
                let grid = cached_grid(self.copula().expect("copula model"))?;
                copula_chain(&grid, n, rng)
            }
        };
        RealSeries::new(values)
    }
}

enum Param {
    Letter(char),
    Explicit(f64),
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl std::str::FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Draws `n` observations of `spec` from the stream `(seed, 0)`.
pub fn generate(spec: &ModelSpec, n: usize, seed: u64) -> Result<RealSeries> {
    spec.generate(n, seed, 0)
}

/// All published parameterizations, in table order (48 entries).
pub fn model_catalog() -> Vec<(String, ModelSpec)> {
    let mut specs = vec![
        ModelSpec::IidGaussian,
        ModelSpec::Qar,
        ModelSpec::Ar2,
        ModelSpec::Arch,
        ModelSpec::Garch,
        ModelSpec::Egarch,
    ];
    specs.extend(AR_LADDER.iter().map(|&phi| ModelSpec::ArGaussian { phi }));
    specs.extend(AR_LADDER.iter().map(|&phi| ModelSpec::ArCauchy { phi }));
    specs.extend(DEPENDENCE_LADDER.iter().map(|&x| ModelSpec::AsymGumbelChain { gamma: 1.0 / x }));
    specs.extend(DEPENDENCE_LADDER.iter().map(|&lambda| ModelSpec::ZeroCirculationChain { lambda }));
    specs.extend(DEPENDENCE_LADDER.iter().map(|&x| ModelSpec::InterleavedAsymGumbel { gamma: 1.0 / x }));
    specs.extend(DEPENDENCE_LADDER.iter().map(|&lambda| ModelSpec::InterleavedZeroCirculation { lambda }));
    specs.extend(KENDALL_LADDER.iter().map(|&kendall| ModelSpec::GumbelChain { kendall }));
    specs.extend(KENDALL_LADDER.iter().map(|&kendall| ModelSpec::ClaytonChain { kendall }));
    specs.push(ModelSpec::Nelsen3Chain);
    specs.push(ModelSpec::Nelsen6Chain);
    specs.into_iter().map(|s| (s.name(), s)).collect()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Open01)
}

fn cauchy(rng: &mut ChaCha8Rng) -> f64 {
    (std::f64::consts::PI * (uniform(rng) - 0.5)).tan()
}

/// Runs `step` for `BURN_IN + n` steps and keeps the last `n` outputs.
fn recursive<S: Copy>(
    n: usize,
    rng: &mut ChaCha8Rng,
    init: S,
    step: impl Fn(S, &mut ChaCha8Rng) -> (f64, S),
) -> Vec<f64> {
    let mut state = init;
    let mut out = Vec::with_capacity(n);
    for t in 0..BURN_IN + n {
        let (x, next) = step(state, rng);
        state = next;
        if t >= BURN_IN {
            out.push(x);
        }
    }
    out
}

fn qar(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let std_normal = Normal::standard();
    recursive(n, rng, 0.0, |x1: f64, rng| {
        let u = uniform(rng);
        let x = 0.1 * std_normal.inverse_cdf(u) + 1.9 * (u - 0.5) * x1;
        (x, x)
    })
}

/// EGARCH(1,1,1) driven by the standardized shock `ε_{t-1} = X_{t-1}/σ_{t-1}`:
/// `ln σ_t² = 0.1 + 0.21(|ε_{t-1}| - E|ε|) - 0.2 ε_{t-1} + 0.8 ln σ_{t-1}²`.
///
/// Feeding the raw `X_{t-1}` into the recursion instead makes `ln σ²` grow
/// like `e^{ln σ²/2}` after a few large negative draws, so that form
/// overflows in long runs.
fn egarch(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mean_abs = (2.0 / std::f64::consts::PI).sqrt();
    recursive(n, rng, (0.0, 0.1 / (1.0 - 0.8)), |(eps1, log_var1): (f64, f64), rng| {
        let log_var = 0.1 + 0.21 * (eps1.abs() - mean_abs) - 0.2 * eps1 + 0.8 * log_var1;
        let eps = normal(rng);
        ((0.5 * log_var).exp() * eps, (eps, log_var))
    })
}

fn copula_chain(grid: &CopulaGrid, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = 0.5;
    let mut out = Vec::with_capacity(n);
    for t in 0..BURN_IN + n {
        v = conditional_inverse_interpolated(grid, uniform(rng), v);
        if t >= BURN_IN {
            out.push(v);
        }
    }
    out
}
