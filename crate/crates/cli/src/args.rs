use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use icspec::inference::TrVariant;
use icspec::{Part, WeightFunction};

#[derive(Debug, Parser)]
#[command(name = "icspec", version, about = "Integrated copula spectra: estimation, bands and tests")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Replay the configuration embedded in an earlier output file (or a
    /// flat `key = value` file); flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the integrated copula spectrum of a series.
    Estimate(EstimateArgs),
    /// Subsampling confidence band around the estimate.
    Band(BandArgs),
    /// Subsampling test for time-reversibility.
    TestTr(TestArgs),
    /// Subsampling test for pairwise tail symmetry.
    TestEq(TestArgs),
    /// Draw a series from one of the simulation models.
    Simulate(SimulateArgs),
    /// Monte Carlo (or exact, for M0) truth surface of a model.
    TruthSurface(TruthArgs),
    /// Run a Monte Carlo coverage or size/power experiment.
    Experiment(ExperimentArgs),
    /// List the simulation models as JSON.
    Catalog(CatalogArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Estimate(_) => "estimate",
            Command::Band(_) => "band",
            Command::TestTr(_) => "test-tr",
            Command::TestEq(_) => "test-eq",
            Command::Simulate(_) => "simulate",
            Command::TruthSurface(_) => "truth-surface",
            Command::Experiment(_) => "experiment",
            Command::Catalog(_) => "catalog",
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file with the series in one column; `#` lines are skipped and a
    /// non-numeric first row is treated as a header.
    #[arg(long, short)]
    pub input: PathBuf,

    /// Column to read: a header name or a 0-based index (default: first).
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FpcArgs {
    /// Apply the finite-population correction (default).
    #[arg(long, overrides_with = "no_fpc")]
    pub fpc: bool,
    /// Disable the finite-population correction.
    #[arg(long = "no-fpc", overrides_with = "fpc")]
    pub no_fpc: bool,
}

impl FpcArgs {
    pub fn enabled(&self) -> bool {
        !self.no_fpc
    }
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    /// Quantile levels, comma separated (overrides --qstep).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Use the levels k/qstep, k = 1..qstep-1.
    #[arg(long, default_value_t = 8)]
    pub qstep: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Frequencies 2πℓ/d, ℓ = 0..⌊d/2⌋.
    #[arg(long, default_value_t = 32)]
    pub d: usize,
    #[command(flatten)]
    pub levels: LevelArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BandKind {
    /// Uniform in λ at one quantile pair.
    D,
    /// Uniform in (λ, τ1, τ2) over all pairs of the levels.
    E,
}

#[derive(Debug, Args)]
pub struct InferenceArgs {
    /// Block length (default: rule of thumb for n).
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub d: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value = "s4", value_parser = parse_weight)]
    pub weight: WeightFunction,
    #[command(flatten)]
    pub fpc: FpcArgs,
}

#[derive(Debug, Args)]
pub struct BandArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub inference: InferenceArgs,
    #[arg(long, value_enum, default_value = "d")]
    pub kind: BandKind,
    #[arg(long, default_value = "re", value_parser = parse_part)]
    pub part: Part,
    #[arg(long, default_value_t = 0.5)]
    pub tau1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub tau2: f64,
    #[command(flatten)]
    pub levels: LevelArgs,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub inference: InferenceArgs,
    /// TR grid levels k/qstep (ignored by test-eq, which uses k/16, k = 2, 3, 4).
    #[arg(long, default_value_t = 8)]
    pub qstep: usize,
    /// Window statistic for test-tr.
    #[arg(long, default_value = "tr1", value_parser = parse_variant)]
    pub variant: TrVariant,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    /// Model name such as M0, M6a or M6[0.4].
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random stream within the seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Args)]
pub struct TruthArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub model: String,
    /// Fine grid size N; also the simulated series length.
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    #[arg(long, default_value_t = 5000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub levels: LevelArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Directory for results.csv, summary.json and the optional extras.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    pub kind: icspec::experiment::ExperimentKind,
    /// Comma-separated model names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub models: Vec<String>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[command(flatten)]
    pub inference: InferenceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "re", value_parser = parse_part)]
    pub part: Part,
    /// Pair of the pointwise coverage band.
    #[arg(long, default_value_t = 0.5)]
    pub tau1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub tau2: f64,
    /// Levels of the uniform coverage band (default k/16).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// TR grid levels k/qstep.
    #[arg(long, default_value_t = 8)]
    pub qstep: usize,
    #[arg(long, default_value = "tr1", value_parser = parse_variant)]
    pub variant: TrVariant,
    #[arg(long = "truth-n", default_value_t = icspec::experiment::DEFAULT_TRUTH_N)]
    pub truth_n: usize,
    #[arg(long = "truth-reps", default_value_t = icspec::experiment::DEFAULT_TRUTH_REPS)]
    pub truth_reps: usize,
    /// Also write the classical TR statistics to competitors.csv.
    #[arg(long, overrides_with = "no_competitors")]
    pub competitors: bool,
    #[arg(long = "no-competitors", overrides_with = "competitors", hide = true)]
    pub no_competitors: bool,
    /// Also write a tidy long-format plot_data.csv.
    #[arg(long = "plot-data", overrides_with = "no_plot_data")]
    pub plot_data: bool,
    #[arg(long = "no-plot-data", overrides_with = "plot_data", hide = true)]
    pub no_plot_data: bool,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_weight(s: &str) -> Result<WeightFunction, String> {
    s.parse().map_err(|e: icspec::Error| e.to_string())
}

fn parse_part(s: &str) -> Result<Part, String> {
    s.parse().map_err(|e: icspec::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<icspec::experiment::ExperimentKind, String> {
    s.parse().map_err(|e: icspec::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<TrVariant, String> {
    match s.to_ascii_lowercase().as_str() {
        "tr1" => Ok(TrVariant::Tr1),
        "tr2" => Ok(TrVariant::Tr2),
        _ => Err(format!("unknown variant '{s}', expected tr1 or tr2")),
    }
}
