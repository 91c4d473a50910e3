use thiserror::Error;

/// Errors produced by the estimation, inference and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series too short for rule-of-thumb block (n = {0}, need n >= 32)")]
    SeriesTooShort(usize),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("window start {start} out of range (n = {n}, b = {b})")]
    WindowOutOfRange { start: usize, n: usize, b: usize },

    #[error("lag {lag} out of range for window length {len}")]
    LagOutOfRange { lag: isize, len: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
