//! Integrated copula spectral analysis of stationary time series.
//!
//! The crate estimates the copula spectral distribution function
//! `F(λ; τ1, τ2)` from rank-based indicator periodograms without any
//! smoothing parameter, builds subsampling confidence bands around the
//! estimate, and runs subsampling tests for time-reversibility and for
//! tail symmetry. Simulation models and a seeded Monte Carlo harness are
//! included so the finite-sample behaviour can be checked end to end.
//!
//! Module map:
//!
//! - [`series`], [`grid`], [`config`]: shared domain types.
//! - [`ranks`]: empirical distribution functions and indicator matrices.
//! - [`spectrum`]: CR periodograms, the integrated estimator, its lag-form
//!   twin and truth surfaces.
//! - [`subsample`]: window estimates, deviation statistics and bands.
//! - [`inference`]: weight functions and the two subsampling tests.
//! - [`competitors`]: classical time-reversibility statistics.
//! - [`models`]: generators for the simulation models M0–M15.
//! - [`experiment`]: the Monte Carlo harness.

pub mod competitors;
pub mod config;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod inference;
pub mod models;
pub mod ranks;
pub mod rng;
pub mod series;
pub mod spectrum;
pub mod subsample;

pub use config::{rule_of_thumb_block, InferenceConfig};
pub use error::{Error, Result};
pub use grid::{FrequencyGrid, QuantileGrid};
pub use inference::{TestReport, WeightFunction};
pub use models::ModelSpec;
pub use series::RealSeries;
pub use spectrum::{integrated_spectrum, Part, SpectralSurface};
