use std::fs;
use std::path::Path;

use icspec::experiment::{run_experiment, ExperimentKind, ExperimentSpec};
use icspec::inference::{default_grid_eq, default_grid_tr, p_eq, p_tr_variant, TrVariant};
use icspec::models::model_catalog;
use icspec::spectrum::{iid_truth_surface, monte_carlo_truth};
use icspec::subsample::{band_d, band_e};
use icspec::{
    integrated_spectrum, rule_of_thumb_block, FrequencyGrid, InferenceConfig, ModelSpec, QuantileGrid,
    RealSeries,
};
use serde_json::{json, Value};

use crate::args::{
    BandArgs, BandKind, CatalogArgs, EstimateArgs, ExperimentArgs, InferenceArgs, InputArgs, LevelArgs,
    OutputArgs, SimulateArgs, TestArgs, TruthArgs,
};
use crate::config::RunConfig;
use crate::error::CliError;

fn variant_name(v: TrVariant) -> &'static str {
    match v {
        TrVariant::Tr1 => "tr1",
        TrVariant::Tr2 => "tr2",
    }
}

/// Reads one numeric column of a CSV file.
pub fn read_series(input: &InputArgs) -> Result<RealSeries, CliError> {
    let file = fs::File::open(&input.input)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", input.input.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut column: Option<usize> = match &input.column {
        Some(c) => c.parse().ok(),
        None => Some(0),
    };
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{}: {e}", input.input.display())))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let idx = match column {
            Some(i) => i,
            None => {
                // Named column: resolve against the header row.
                let name = input.column.as_deref().unwrap_or_default();
                let i = record.iter().position(|h| h == name).ok_or_else(|| {
                    CliError::Data(format!("column '{name}' not found in header"))
                })?;
                column = Some(i);
                continue;
            }
        };
        let field = record.get(idx).ok_or_else(|| {
            CliError::Data(format!("row {}: no column {idx}", row + 1))
        })?;
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if values.is_empty() && row == 0 => continue,
            Err(_) => {
                return Err(CliError::Data(format!("row {}: '{field}' is not a number", row + 1)));
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::Data(format!("{}: no data", input.input.display())));
    }
    Ok(RealSeries::new(values)?)
}

fn write_output(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn levels_of(args: &LevelArgs) -> Result<QuantileGrid, CliError> {
    match &args.levels {
        Some(levels) => QuantileGrid::from_unsorted(levels.clone()).map_err(|e| CliError::Usage(e.to_string())),
        None => QuantileGrid::equispaced(args.qstep).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn push_input(cfg: &mut RunConfig, input: &InputArgs) {
    cfg.push("input", input.input.display());
    if let Some(c) = &input.column {
        cfg.push("column", c);
    }
}

fn inference_config(
    args: &InferenceArgs,
    n: usize,
    levels: QuantileGrid,
    cfg: &mut RunConfig,
) -> Result<InferenceConfig, CliError> {
    let b = match args.b {
        Some(b) => b,
        None => rule_of_thumb_block(n)?,
    };
    let inference = InferenceConfig {
        b,
        d: args.d,
        alpha: args.alpha,
        fpc: args.fpc.enabled(),
        weight: args.weight,
        quantile_grid: levels,
        seed: 0,
    };
    inference.validate(n)?;
    cfg.push("b", b)
        .push("d", args.d)
        .push("alpha", args.alpha)
        .push("weight", args.weight)
        .push("fpc", inference.fpc);
    Ok(inference)
}

pub fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let series = read_series(&args.input)?;
    let fgrid = FrequencyGrid::new(args.d).map_err(|e| CliError::Usage(e.to_string()))?;
    let qgrid = levels_of(&args.levels)?;
    let mut cfg = RunConfig::new("estimate");
    push_input(&mut cfg, &args.input);
    cfg.push("d", args.d).push_list("levels", qgrid.levels());
    let surface = integrated_spectrum(series.values(), &fgrid, &qgrid)?;
    write_output(&args.output, &format!("{}{}", cfg.csv_preamble(), surface.to_csv()))
}

pub fn band(args: &BandArgs) -> Result<(), CliError> {
    let series = read_series(&args.input)?;
    let mut cfg = RunConfig::new("band");
    push_input(&mut cfg, &args.input);
    let kind = match args.kind {
        BandKind::D => "d",
        BandKind::E => "e",
    };
    cfg.push("kind", kind).push("part", args.part.as_str());
    let levels = levels_of(&args.levels)?;
    let band = match args.kind {
        BandKind::D => {
            cfg.push("tau1", args.tau1).push("tau2", args.tau2);
            let inference = inference_config(&args.inference, series.len(), levels, &mut cfg)?;
            band_d(&series, &inference, args.part, args.tau1, args.tau2)?
        }
        BandKind::E => {
            cfg.push_list("levels", levels.levels());
            let pairs: Vec<(f64, f64)> = levels
                .levels()
                .iter()
                .flat_map(|&a| levels.levels().iter().map(move |&b| (a, b)))
                .collect();
            let inference = inference_config(&args.inference, series.len(), levels.clone(), &mut cfg)?;
            band_e(&series, &inference, args.part, &pairs)?
        }
    };
    let text = format!(
        "{}# critical value: {}\n{}",
        cfg.csv_preamble(),
        band.critical_value,
        band.to_csv()
    );
    write_output(&args.output, &text)
}

pub fn test(args: &TestArgs, eq: bool) -> Result<(), CliError> {
    let series = read_series(&args.input)?;
    let name = if eq { "test-eq" } else { "test-tr" };
    let mut cfg = RunConfig::new(name);
    push_input(&mut cfg, &args.input);
    let grid = if eq {
        default_grid_eq(args.inference.d)
    } else {
        default_grid_tr(args.inference.d, args.qstep)
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let levels = grid.levels()?;
    let inference = inference_config(&args.inference, series.len(), levels, &mut cfg)?;
    let report = if eq {
        p_eq(&series, &inference, &grid)?
    } else {
        cfg.push("qstep", args.qstep).push("variant", variant_name(args.variant));
        p_tr_variant(&series, &inference, &grid, args.variant)?
    };
    let mut value = serde_json::to_value(&report).map_err(|e| CliError::Data(e.to_string()))?;
    value
        .as_object_mut()
        .expect("report serializes to an object")
        .insert("config".into(), cfg.to_json());
    write_output(&args.output, &pretty(&value))
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

fn parse_model(name: &str) -> Result<ModelSpec, CliError> {
    ModelSpec::parse(name).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let model = parse_model(&args.model)?;
    let mut cfg = RunConfig::new("simulate");
    cfg.push("model", model.name())
        .push("n", args.n)
        .push("seed", args.seed)
        .push("stream", args.stream);
    let series = model.generate(args.n, args.seed, args.stream)?;
    let mut text = cfg.csv_preamble();
    text.push_str("x\n");
    for v in series.values() {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    write_output(&args.output, &text)
}

pub fn truth_surface(args: &TruthArgs) -> Result<(), CliError> {
    let model = parse_model(&args.model)?;
    let fgrid = FrequencyGrid::new(args.n).map_err(|e| CliError::Usage(e.to_string()))?;
    let qgrid = levels_of(&args.levels)?;
    let mut cfg = RunConfig::new("truth-surface");
    cfg.push("model", model.name())
        .push("n", args.n)
        .push("reps", args.reps)
        .push("seed", args.seed)
        .push_list("levels", qgrid.levels());
    let surface = if model == ModelSpec::IidGaussian {
        iid_truth_surface(&fgrid, &qgrid)
    } else {
        monte_carlo_truth(&model, args.n, args.reps, &fgrid, &qgrid, args.seed)?
    };
    write_output(&args.output, &format!("{}{}", cfg.csv_preamble(), surface.to_csv()))
}

pub fn experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let models = args
        .models
        .iter()
        .map(|m| parse_model(m))
        .collect::<Result<Vec<_>, _>>()?;
    let mut spec = ExperimentSpec::new(args.kind, models, args.n.clone(), args.reps);
    spec.block = args.inference.b;
    spec.d = args.inference.d;
    spec.alpha = args.inference.alpha;
    spec.fpc = args.inference.fpc.enabled();
    spec.weight = args.inference.weight;
    spec.seed = args.seed;
    spec.part = args.part;
    spec.pair = (args.tau1, args.tau2);
    if let Some(levels) = &args.levels {
        spec.coverage_levels =
            QuantileGrid::from_unsorted(levels.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    spec.tr_qstep = args.qstep;
    spec.tr_variant = args.variant;
    spec.truth_n = args.truth_n;
    spec.truth_reps = args.truth_reps;
    spec.competitors = args.competitors && !args.no_competitors;
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let plot_data = args.plot_data && !args.no_plot_data;

    let mut cfg = RunConfig::new("experiment");
    cfg.push("kind", args.kind.as_str())
        .push_list("models", &spec.models.iter().map(ModelSpec::name).collect::<Vec<_>>())
        .push_list("n", &spec.ns)
        .push("reps", spec.reps);
    if let Some(b) = spec.block {
        cfg.push("b", b);
    }
    cfg.push("d", spec.d)
        .push("alpha", spec.alpha)
        .push("weight", spec.weight)
        .push("fpc", spec.fpc)
        .push("seed", spec.seed)
        .push("part", spec.part.as_str())
        .push("tau1", spec.pair.0)
        .push("tau2", spec.pair.1)
        .push_list("levels", spec.coverage_levels.levels())
        .push("qstep", spec.tr_qstep)
        .push("variant", variant_name(spec.tr_variant))
        .push("truth-n", spec.truth_n)
        .push("truth-reps", spec.truth_reps)
        .push("competitors", spec.competitors)
        .push("plot-data", plot_data);

    let outcome = run_experiment(&spec)?;
    let dir = &args.output;
    fs::create_dir_all(dir)?;
    let preamble = cfg.csv_preamble();
    write_file(&dir.join("results.csv"), &format!("{preamble}{}", outcome.rows_csv()))?;
    let summary = json!({
        "config": cfg.to_json(),
        "summaries": outcome.summaries,
    });
    write_file(&dir.join("summary.json"), &pretty(&summary))?;
    if spec.competitors {
        write_file(&dir.join("competitors.csv"), &format!("{preamble}{}", outcome.competitors_csv()))?;
    }
    for (name, surface) in &outcome.truths {
        write_file(&dir.join(format!("truth-{name}.csv")), &format!("{preamble}{}", surface.to_csv()))?;
    }
    if plot_data {
        let mut text = format!("{preamble}kind,model,n,b,reps,rate,mc_se\n");
        for s in &outcome.summaries {
            text.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                args.kind.as_str(),
                s.model,
                s.n,
                s.b,
                s.reps,
                s.rate,
                s.mc_se
            ));
        }
        write_file(&dir.join("plot_data.csv"), &text)?;
    }
    for s in &outcome.summaries {
        eprintln!(
            "{} n={} b={} reps={} rate={:.4} se={:.4}",
            s.model, s.n, s.b, s.reps, s.rate, s.mc_se
        );
    }
    if args.kind == ExperimentKind::TruthSurface {
        eprintln!("wrote {} truth surfaces", outcome.truths.len());
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub fn catalog(args: &CatalogArgs) -> Result<(), CliError> {
    let entries: Vec<Value> = model_catalog()
        .into_iter()
        .map(|(name, spec)| json!({ "name": name, "spec": spec }))
        .collect();
    write_output(&args.output, &pretty(&Value::Array(entries)))
}
