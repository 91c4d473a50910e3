//! Seeded Monte Carlo harness for coverage and size/power studies.
//!
//! Replication `r` of model `M` at sample size `n` draws its series from the
//! random stream `stream_id(["experiment", M, n, r])` under the experiment
//! seed, so results do not depend on thread count or execution order.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::competitors::{competitor_statistic, CompetitorKind};
use crate::config::{rule_of_thumb_block, InferenceConfig, DEFAULT_ALPHA, DEFAULT_D};
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, QuantileGrid};
use crate::inference::{default_grid_eq, default_grid_tr, p_eq, p_tr_variant, TrVariant, WeightFunction};
use crate::models::ModelSpec;
use crate::rng::{label_key, stream_id, RNG_ALGORITHM};
use crate::spectrum::{iid_truth_surface, monte_carlo_truth, Part, SpectralSurface};
use crate::subsample::{band_d, band_e, coverage_indicator, CoverageMode};

/// Fine Fourier grid size used for truth surfaces.
pub const DEFAULT_TRUTH_N: usize = 2048;
pub const DEFAULT_TRUTH_REPS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CoveragePointwise,
    CoverageUniform,
    SizePowerTr,
    SizePowerEq,
    TruthSurface,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        Self::CoveragePointwise,
        Self::CoverageUniform,
        Self::SizePowerTr,
        Self::SizePowerEq,
        Self::TruthSurface,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CoveragePointwise => "coverage-pointwise",
            Self::CoverageUniform => "coverage-uniform",
            Self::SizePowerTr => "size-power-tr",
            Self::SizePowerEq => "size-power-eq",
            Self::TruthSurface => "truth-surface",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown experiment kind '{s}'")))
    }
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub models: Vec<ModelSpec>,
    pub ns: Vec<usize>,
    pub reps: usize,
    /// Block length; `None` selects the rule of thumb for each `n`.
    pub block: Option<usize>,
    pub d: usize,
    pub alpha: f64,
    pub fpc: bool,
    pub weight: WeightFunction,
    pub seed: u64,
    /// Part compared in coverage experiments.
    pub part: Part,
    /// Quantile pair of the pointwise coverage band.
    pub pair: (f64, f64),
    /// Levels whose ordered pairs make up the uniform coverage band.
    pub coverage_levels: QuantileGrid,
    /// TR grid levels are `k/tr_qstep`.
    pub tr_qstep: usize,
    pub tr_variant: TrVariant,
    /// Fine grid size (and series length) of Monte Carlo truth surfaces.
    pub truth_n: usize,
    pub truth_reps: usize,
    /// Also record the classical TR statistics in size/power experiments.
    pub competitors: bool,
}

impl ExperimentSpec {
    /// Defaults: `d = 32`, `α = 0.05`, correction on, `s4`, real parts,
    /// pointwise pair `(0.5, 0.5)`, uniform levels `k/16`, TR levels `k/8`.
    pub fn new(kind: ExperimentKind, models: Vec<ModelSpec>, ns: Vec<usize>, reps: usize) -> Self {
        Self {
            kind,
            models,
            ns,
            reps,
            block: None,
            d: DEFAULT_D,
            alpha: DEFAULT_ALPHA,
            fpc: true,
            weight: WeightFunction::S4,
            seed: 0,
            part: Part::Re,
            pair: (0.5, 0.5),
            coverage_levels: QuantileGrid::equispaced(16).expect("valid grid"),
            tr_qstep: 8,
            tr_variant: TrVariant::Tr1,
            truth_n: DEFAULT_TRUTH_N,
            truth_reps: DEFAULT_TRUTH_REPS,
            competitors: false,
        }
    }

    pub fn block_for(&self, n: usize) -> Result<usize> {
        match self.block {
            Some(b) => Ok(b),
            None => rule_of_thumb_block(n),
        }
    }

    pub fn inference_config(&self, n: usize) -> Result<InferenceConfig> {
        Ok(InferenceConfig {
            b: self.block_for(n)?,
            d: self.d,
            alpha: self.alpha,
            fpc: self.fpc,
            weight: self.weight,
            quantile_grid: self.coverage_levels.clone(),
            seed: self.seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("experiment needs reps >= 1".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Empty("model list"));
        }
        for m in &self.models {
            m.validate()?;
        }
        if self.kind != ExperimentKind::TruthSurface {
            if self.ns.is_empty() {
                return Err(Error::Empty("sample size list"));
            }
            for &n in &self.ns {
                let cfg = self.inference_config(n)?;
                cfg.validate(n)?;
                if n < 2 * cfg.b {
                    return Err(Error::InvalidConfig(format!(
                        "n = {n} must be at least 2b = {}",
                        2 * cfg.b
                    )));
                }
            }
        }
        if self.truth_n < self.d {
            return Err(Error::InvalidConfig(format!(
                "truth grid N = {} must be >= d = {}",
                self.truth_n, self.d
            )));
        }
        if self.truth_reps == 0 {
            return Err(Error::InvalidConfig("truth needs reps >= 1".into()));
        }
        FrequencyGrid::new(self.d)?;
        QuantileGrid::from_unsorted(vec![self.pair.0, self.pair.1])?;
        if self.tr_qstep < 2 {
            return Err(Error::InvalidConfig("tr_qstep must be >= 2".into()));
        }
        Ok(())
    }

    /// Levels of the truth surfaces used for coverage.
    fn truth_levels(&self) -> Result<QuantileGrid> {
        let mut levels = self.coverage_levels.levels().to_vec();
        levels.extend([self.pair.0, self.pair.1]);
        QuantileGrid::from_unsorted(levels)
    }

    /// Truth surface of `model` on the fine grid `N = truth_n`: exact for
    /// M0, Monte Carlo otherwise.
    pub fn truth_for(&self, model: &ModelSpec) -> Result<SpectralSurface> {
        let fine = FrequencyGrid::new(self.truth_n)?;
        let levels = self.truth_levels()?;
        if *model == ModelSpec::IidGaussian {
            Ok(iid_truth_surface(&fine, &levels))
        } else {
            monte_carlo_truth(model, self.truth_n, self.truth_reps, &fine, &levels, self.seed)
        }
    }

    /// Ordered pairs of the uniform coverage band.
    pub fn uniform_pairs(&self) -> Vec<(f64, f64)> {
        let levels = self.coverage_levels.levels();
        levels
            .iter()
            .flat_map(|&a| levels.iter().map(move |&b| (a, b)))
            .collect()
    }
}

/// One replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub model: String,
    pub n: usize,
    pub b: usize,
    pub replication: usize,
    /// Test statistic, or the band critical value for coverage runs.
    pub statistic: f64,
    pub p_value: Option<f64>,
    /// Rejection (tests) or coverage (bands).
    pub indicator: bool,
}

/// Classical TR statistics of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitorRow {
    pub model: String,
    pub n: usize,
    pub replication: usize,
    pub kind: CompetitorKind,
    pub statistic: f64,
}

/// Rate of the indicator over the replications of one `(model, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub model: String,
    pub n: usize,
    pub b: usize,
    pub reps: usize,
    pub rate: f64,
    /// Binomial Monte Carlo standard error `√(rate(1 - rate)/reps)`.
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub rng: String,
    pub rows: Vec<ExperimentRow>,
    pub summaries: Vec<ExperimentSummary>,
    #[serde(default)]
    pub competitor_rows: Vec<CompetitorRow>,
    /// Truth surfaces produced by `truth-surface` runs, keyed by model name.
    #[serde(default)]
    pub truths: Vec<(String, SpectralSurface)>,
}

pub const ROWS_CSV_HEADER: &str = "model,n,b,replication,statistic,p_value,indicator";
pub const COMPETITOR_CSV_HEADER: &str = "model,n,replication,kind,statistic";

impl ExperimentOutcome {
    pub fn rows_csv(&self) -> String {
        let mut out = String::from(ROWS_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let p = r.p_value.map(|p| p.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.model, r.n, r.b, r.replication, r.statistic, p, r.indicator as u8
            );
        }
        out
    }

    pub fn competitors_csv(&self) -> String {
        let mut out = String::from(COMPETITOR_CSV_HEADER);
        out.push('\n');
        for r in &self.competitor_rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.model, r.n, r.replication, r.kind, r.statistic);
        }
        out
    }

    pub fn summary_for(&self, model: &str, n: usize) -> Option<&ExperimentSummary> {
        self.summaries.iter().find(|s| s.model == model && s.n == n)
    }
}

fn summarize(model: &str, n: usize, b: usize, rows: &[ExperimentRow]) -> ExperimentSummary {
    let reps = rows.len();
    let rate = rows.iter().filter(|r| r.indicator).count() as f64 / reps as f64;
    ExperimentSummary {
        model: model.to_string(),
        n,
        b,
        reps,
        rate,
        mc_se: (rate * (1.0 - rate) / reps as f64).sqrt(),
    }
}

/// Stream of replication `r` of `model` at size `n`.
pub fn replication_stream(model: &ModelSpec, n: usize, r: usize) -> u64 {
    stream_id(&[label_key("experiment"), label_key(&model.name()), n as u64, r as u64])
}

/// Runs the experiment.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let mut outcome = ExperimentOutcome {
        spec: spec.clone(),
        rng: RNG_ALGORITHM.to_string(),
        rows: Vec::new(),
        summaries: Vec::new(),
        competitor_rows: Vec::new(),
        truths: Vec::new(),
    };

    if spec.kind == ExperimentKind::TruthSurface {
        for model in &spec.models {
            log::info!("truth surface for {model} ({} reps, N = {})", spec.truth_reps, spec.truth_n);
            outcome.truths.push((model.name(), spec.truth_for(model)?));
        }
        return Ok(outcome);
    }

    let tr_grid = default_grid_tr(spec.d, spec.tr_qstep)?;
    let eq_grid = default_grid_eq(spec.d)?;
    let uniform_pairs = spec.uniform_pairs();

    for model in &spec.models {
        let name = model.name();
        let truth = match spec.kind {
            ExperimentKind::CoveragePointwise | ExperimentKind::CoverageUniform => Some(spec.truth_for(model)?),
            _ => None,
        };
        for &n in &spec.ns {
            let cfg = spec.inference_config(n)?;
            log::info!("{} {name} n = {n} b = {} reps = {}", spec.kind.as_str(), cfg.b, spec.reps);
            let results: Vec<(ExperimentRow, Vec<CompetitorRow>)> = (0..spec.reps)
                .into_par_iter()
                .map(|r| {
                    let series = model.generate(n, spec.seed, replication_stream(model, n, r))?;
                    let (statistic, p_value, indicator) = match spec.kind {
                        ExperimentKind::CoveragePointwise => {
                            let (t1, t2) = spec.pair;
                            let band = band_d(&series, &cfg, spec.part, t1, t2)?;
                            let mode = CoverageMode::Pointwise { tau1: t1, tau2: t2 };
                            let hit = coverage_indicator(&band, truth.as_ref().expect("truth"), mode)?;
                            (band.critical_value, None, hit)
                        }
                        ExperimentKind::CoverageUniform => {
                            let band = band_e(&series, &cfg, spec.part, &uniform_pairs)?;
                            let hit = coverage_indicator(&band, truth.as_ref().expect("truth"), CoverageMode::Uniform)?;
                            (band.critical_value, None, hit)
                        }
                        ExperimentKind::SizePowerTr => {
                            let rep = p_tr_variant(&series, &cfg, &tr_grid, spec.tr_variant)?;
                            (rep.statistic, Some(rep.p_value), rep.reject)
                        }
                        ExperimentKind::SizePowerEq => {
                            let rep = p_eq(&series, &cfg, &eq_grid)?;
                            (rep.statistic, Some(rep.p_value), rep.reject)
                        }
                        ExperimentKind::TruthSurface => unreachable!("handled above"),
                    };
                    let competitors = if spec.competitors {
                        CompetitorKind::ALL
                            .iter()
                            .map(|&kind| {
                                Ok(CompetitorRow {
                                    model: name.clone(),
                                    n,
                                    replication: r,
                                    kind,
                                    statistic: competitor_statistic(kind, series.values())?,
                                })
                            })
                            .collect::<Result<Vec<_>>>()?
                    } else {
                        Vec::new()
                    };
                    let row = ExperimentRow {
                        model: name.clone(),
                        n,
                        b: cfg.b,
                        replication: r,
                        statistic,
                        p_value,
                        indicator,
                    };
                    Ok((row, competitors))
                })
                .collect::<Result<_>>()?;
            let rows: Vec<ExperimentRow> = results.iter().map(|(row, _)| row.clone()).collect();
            outcome.summaries.push(summarize(&name, n, cfg.b, &rows));
            outcome.rows.extend(rows);
            outcome.competitor_rows.extend(results.into_iter().flat_map(|(_, c)| c));
        }
    }
    Ok(outcome)
}
