//! Command-line front end composing the attribution pipeline: simulate or
//! load loss data, analyze distribution overlap, calibrate the Box-Cox
//! transform, train the 1-D SVM, and emit table-layout reports. All
//! randomness flows from explicit `--seed` values; identical invocations
//! produce byte-identical data files.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lossprov::classifier::{self, LambdaPopulation, SvmModel, TrainConfig, TransformChoice};
use lossprov::drift_sim::{self, DriftConfig};
use lossprov::error::Error;
use lossprov::kde_overlap;
use lossprov::loss_model::{self, FileFormat, GroupConfig, LossDataset};
use lossprov::metrics;
use lossprov::pipeline;
use lossprov::transform::{self, LambdaStrategy, TransformSpec};

use output::{LambdaCurveDocument, ReportDocument, ReportSection};

#[derive(Parser)]
#[command(name = "lossprov", version, about = "Provenance attribution on reconstruction-loss data")]
struct Cli {
    /// Worker threads for overlap computation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic drift dataset (losses.csv + manifest.json).
    Simulate(SimulateArgs),
    /// Pairwise distribution-overlap matrix of a loss file.
    Overlap(OverlapArgs),
    /// Fit and apply a transformation to every loss in a file.
    Transform(TransformArgs),
    /// Train the 1-D SVM on a loss file and group config.
    Train(TrainArgs),
    /// Evaluate a trained model on a loss file, subset by subset.
    Evaluate(EvaluateArgs),
    /// Full run: simulate-or-load, calibrate, train, evaluate, report.
    Pipeline(PipelineArgs),
    /// Render a JSON report as a plain-text summary.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Loss dataset file (CSV with header `id,category,loss,seed`, or a
    /// JSON array of records).
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

impl InputArgs {
    fn load(&self) -> lossprov::Result<LossDataset> {
        let format = match self.format {
            Some(FormatArg::Csv) => FileFormat::Csv,
            Some(FormatArg::Json) => FileFormat::Json,
            None => infer_format(&self.input),
        };
        let bytes = std::fs::read(&self.input)?;
        loss_model::parse_loss_file(&bytes, format)
    }
}

fn infer_format(path: &Path) -> FileFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => FileFormat::Json,
        _ => FileFormat::Csv,
    }
}

#[derive(Args, Clone)]
struct DriftArgs {
    #[arg(long, default_value_t = 16)]
    latent_dim: usize,
    #[arg(long, default_value_t = 400)]
    samples_per_category: usize,
    #[arg(long, default_value_t = 5)]
    max_iterations: usize,
    #[arg(long, default_value_t = 0.15)]
    edit_strength: f64,
    #[arg(long, default_value_t = 0.02)]
    noise_sigma: f64,
}

impl DriftArgs {
    fn config(&self, seed: u64) -> DriftConfig {
        DriftConfig {
            latent_dim: self.latent_dim,
            n_samples_per_category: self.samples_per_category,
            max_iterations: self.max_iterations,
            edit_strength: self.edit_strength,
            noise_sigma: self.noise_sigma,
            seed,
        }
    }
}

#[derive(Args, Clone)]
struct SimulateArgs {
    #[command(flatten)]
    drift: DriftArgs,
    /// Root seed; the dataset is a pure function of the config and seed.
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct OverlapArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Fixed KDE bandwidth; Silverman's rule when omitted.
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, default_value_t = kde_overlap::DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Output directory (overlap.csv, plus overlap.json with --json).
    #[arg(long)]
    out: PathBuf,
    /// Also write the matrix as a JSON object.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Mle,
    Skew,
    Kurt,
}

impl From<StrategyArg> for LambdaStrategy {
    fn from(value: StrategyArg) -> Self {
        match value {
            StrategyArg::Mle => LambdaStrategy::Mle,
            StrategyArg::Skew => LambdaStrategy::Skewness,
            StrategyArg::Kurt => LambdaStrategy::Kurtosis,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AltArg {
    Zscore,
    Log,
    Exp,
    Power,
    Identity,
}

#[derive(Args, Clone)]
struct StrategyArgs {
    /// λ-selection strategy for the Box-Cox transform.
    #[arg(long, value_enum, default_value_t = StrategyArg::Mle)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    grid_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    grid_max: f64,
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,
    /// Moment target for skew/kurt strategies (defaults: 0 and 1).
    #[arg(long, allow_negative_numbers = true)]
    target: Option<f64>,
    /// Bypass Box-Cox with a fixed alternate transform.
    #[arg(long, value_enum)]
    alt: Option<AltArg>,
    /// Exponent for the power transform.
    #[arg(long, default_value_t = 0.5)]
    power_exponent: f64,
    /// Shift added to losses before power transforms.
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
}

impl StrategyArgs {
    fn alt_spec(&self, alt: AltArg) -> TransformSpec {
        let spec = match alt {
            AltArg::Zscore => TransformSpec::z_score(),
            AltArg::Log => TransformSpec::log(),
            AltArg::Exp => TransformSpec::exp(),
            AltArg::Power => TransformSpec::power(self.power_exponent),
            AltArg::Identity => TransformSpec::identity(),
        };
        spec.with_epsilon(self.epsilon)
    }

    fn choice(&self) -> lossprov::Result<TransformChoice> {
        match self.alt {
            Some(alt) => Ok(TransformChoice::Fixed(self.alt_spec(alt))),
            None => Ok(TransformChoice::BoxCox {
                strategy: self.strategy.into(),
                grid: transform::grid_from_range(self.grid_min, self.grid_max, self.grid_step)?,
                target: self.target,
                shift_epsilon: self.epsilon,
            }),
        }
    }

    fn resolved_target(&self) -> Option<f64> {
        self.target
            .or_else(|| LambdaStrategy::from(self.strategy).default_target())
    }
}

#[derive(Args, Clone)]
struct TrainExtraArgs {
    /// Hinge-loss weight C.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Subgradient-descent iterations.
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
    /// Which training losses feed the λ search.
    #[arg(long, value_enum, default_value_t = LambdaOnArg::Pooled)]
    lambda_on: LambdaOnArg,
    /// Inverse-frequency class weights in the hinge loss.
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    class_weighting: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LambdaOnArg {
    Pooled,
    Positive,
    Negative,
}

impl From<LambdaOnArg> for LambdaPopulation {
    fn from(value: LambdaOnArg) -> Self {
        match value {
            LambdaOnArg::Pooled => LambdaPopulation::Pooled,
            LambdaOnArg::Positive => LambdaPopulation::PositiveOnly,
            LambdaOnArg::Negative => LambdaPopulation::NegativeOnly,
        }
    }
}

#[derive(Args, Clone)]
struct TransformArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    strategy: StrategyArgs,
    /// Output directory (transformed.csv + lambda_curve.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Group config JSON: {"name", "positive": [...], "negative": [...]}.
    #[arg(long)]
    group: PathBuf,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[command(flatten)]
    train: TrainExtraArgs,
    #[arg(long)]
    seed: u64,
    /// Output directory (model.json + lambda_curve.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct EvaluateArgs {
    /// Trained model JSON written by `train` or `pipeline`.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    group: PathBuf,
    /// Output directory (report.csv + report.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    /// Loss dataset file; mutually exclusive with --simulate.
    #[arg(long, required_unless_present = "simulate", conflicts_with = "simulate")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Generate the dataset with the drift simulator instead of loading.
    #[arg(long)]
    simulate: bool,
    #[command(flatten)]
    drift: DriftArgs,
    /// Group config JSON; defaults to gen-vs-all-edits for simulated data.
    #[arg(long, required_unless_present = "simulate")]
    group: Option<PathBuf>,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[command(flatten)]
    train: TrainExtraArgs,
    /// Root seed for simulation, the train/test split, and training.
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct ReportArgs {
    /// report.json written by `evaluate` or `pipeline`.
    #[arg(long)]
    input: PathBuf,
    /// Write the summary here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a DriftConfig,
    categories: Vec<String>,
    rows: usize,
    created_utc: String,
    tool_version: &'static str,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // ignore failure: the global pool can only be set once
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 1 = data error, 2 = config error, 3 = degenerate numerical condition.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::InvalidData(_) | Error::Io(_) => 1,
        Error::InvalidConfig(_) => 2,
        Error::Degenerate(_) => 3,
    }
}

fn run(command: Command) -> lossprov::Result<()> {
    match command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Overlap(args) => cmd_overlap(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_simulate(args: SimulateArgs) -> lossprov::Result<()> {
    let config = args.drift.config(args.seed);
    let dataset = drift_sim::generate_dataset(&config)?;
    write_dataset_with_manifest(&args.out, &dataset, &config)?;
    println!(
        "wrote {} rows across {} categories to {}",
        dataset.len(),
        dataset.categories().len(),
        args.out.join("losses.csv").display()
    );
    Ok(())
}

fn write_dataset_with_manifest(
    out: &Path,
    dataset: &LossDataset,
    config: &DriftConfig,
) -> lossprov::Result<()> {
    let manifest = Manifest {
        config,
        categories: dataset.categories_in_order().to_vec(),
        rows: dataset.len(),
        created_utc: chrono::Utc::now().to_rfc3339(),
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    output::write_atomic(
        &out.join("losses.csv"),
        &loss_model::write_loss_file(dataset, FileFormat::Csv),
    )?;
    output::write_atomic(
        &out.join("manifest.json"),
        to_pretty_json(&manifest).as_bytes(),
    )?;
    Ok(())
}

fn cmd_overlap(args: OverlapArgs) -> lossprov::Result<()> {
    let dataset = args.input.load()?;
    let matrix = kde_overlap::overlap_matrix(&dataset, args.bandwidth, args.grid_points)?;
    output::write_atomic(
        &args.out.join("overlap.csv"),
        output::overlap_csv(&matrix).as_bytes(),
    )?;
    if args.json {
        output::write_atomic(
            &args.out.join("overlap.json"),
            to_pretty_json(&matrix).as_bytes(),
        )?;
    }
    println!(
        "wrote {}x{} overlap matrix to {}",
        matrix.len(),
        matrix.len(),
        args.out.join("overlap.csv").display()
    );
    Ok(())
}

fn cmd_transform(args: TransformArgs) -> lossprov::Result<()> {
    let dataset = args.input.load()?;
    let losses: Vec<f64> = dataset.samples().iter().map(|s| s.loss).collect();
    let (transformed, curve) = match args.strategy.alt.map(|alt| args.strategy.alt_spec(alt)) {
        Some(spec) => {
            let label = format!("fixed:{}", spec.kind);
            (spec.apply(&losses)?, LambdaCurveDocument::fixed(&label))
        }
        None => {
            let search = transform::select_lambda(
                &losses,
                args.strategy.strategy.into(),
                &transform::grid_from_range(
                    args.strategy.grid_min,
                    args.strategy.grid_max,
                    args.strategy.grid_step,
                )?,
                args.strategy.target,
                args.strategy.epsilon,
            )?;
            let spec =
                TransformSpec::box_cox(search.lambda_star).with_epsilon(args.strategy.epsilon);
            let curve = LambdaCurveDocument::from_search(&search, args.strategy.resolved_target());
            (spec.apply(&losses)?, curve)
        }
    };

    // Same column layout as a loss file; transformed values may be negative,
    // so this output is terminal rather than re-ingestible.
    let mut csv = String::from("id,category,loss,seed\n");
    for (sample, value) in dataset.samples().iter().zip(&transformed) {
        let seed = sample.seed.map(|s| s.to_string()).unwrap_or_default();
        csv.push_str(&format!("{},{},{},{}\n", sample.id, sample.category, value, seed));
    }
    output::write_atomic(&args.out.join("transformed.csv"), csv.as_bytes())?;
    output::write_atomic(
        &args.out.join("lambda_curve.json"),
        to_pretty_json(&curve).as_bytes(),
    )?;
    match curve.lambda_star {
        Some(l) => println!("lambda* = {l} ({})", curve.strategy),
        None => println!("applied {}", curve.strategy),
    }
    Ok(())
}

fn load_group(path: &Path) -> lossprov::Result<GroupConfig> {
    GroupConfig::from_json(&std::fs::read(path)?)
}

fn train_config(
    strategy: &StrategyArgs,
    train: &TrainExtraArgs,
    seed: u64,
) -> lossprov::Result<TrainConfig> {
    Ok(TrainConfig {
        transform: strategy.choice()?,
        lambda_population: train.lambda_on.into(),
        c_param: train.c,
        iterations: train.iterations,
        seed,
        class_weighting: train.class_weighting,
    })
}

fn lambda_curve_for(
    outcome: &classifier::TrainOutcome,
    strategy: &StrategyArgs,
) -> LambdaCurveDocument {
    match &outcome.lambda_search {
        Some(search) => LambdaCurveDocument::from_search(search, strategy.resolved_target()),
        None => LambdaCurveDocument::fixed(&outcome.model.strategy),
    }
}

fn cmd_train(args: TrainArgs) -> lossprov::Result<()> {
    let dataset = args.input.load()?;
    let group = load_group(&args.group)?;
    let labeled = dataset.select_binary(&group)?;
    let config = train_config(&args.strategy, &args.train, args.seed)?;
    let outcome = classifier::train(&labeled, &config)?;
    output::write_atomic(
        &args.out.join("model.json"),
        outcome.model.to_json().as_bytes(),
    )?;
    output::write_atomic(
        &args.out.join("lambda_curve.json"),
        to_pretty_json(&lambda_curve_for(&outcome, &args.strategy)).as_bytes(),
    )?;
    println!(
        "trained on {} losses ({} dropped); model at {}",
        labeled.len(),
        dataset.len() - labeled.len(),
        args.out.join("model.json").display()
    );
    Ok(())
}

fn default_subsets(dataset: &LossDataset, group: &GroupConfig) -> Vec<(String, Vec<String>)> {
    let negatives: Vec<String> = dataset
        .categories_in_order()
        .iter()
        .filter(|c| group.negative_categories().contains(*c))
        .cloned()
        .collect();
    metrics::iteration_subsets(&negatives)
}

fn cmd_evaluate(args: EvaluateArgs) -> lossprov::Result<()> {
    let model = SvmModel::from_json(&std::fs::read(&args.model)?)?;
    let dataset = args.input.load()?;
    let group = load_group(&args.group)?;
    let subsets = default_subsets(&dataset, &group);
    let reports = metrics::evaluate(&model, &dataset, &group, &subsets)?;
    let doc = ReportDocument {
        group: group.name().to_string(),
        strategy: model.strategy.clone(),
        lambda_star: model.lambda_spec.lambda,
        sections: vec![ReportSection {
            name: "evaluation".to_string(),
            reports: reports.clone(),
        }],
    };
    output::write_atomic(
        &args.out.join("report.csv"),
        output::report_csv(&reports).as_bytes(),
    )?;
    output::write_atomic(&args.out.join("report.json"), to_pretty_json(&doc).as_bytes())?;
    print!("{}", output::render_summary(&doc));
    Ok(())
}

fn cmd_pipeline(args: PipelineArgs) -> lossprov::Result<()> {
    let (dataset, drift_config) = if args.simulate {
        let config = args.drift.config(args.seed);
        (drift_sim::generate_dataset(&config)?, Some(config))
    } else {
        let input = InputArgs {
            input: args.input.clone().expect("clap enforces --input"),
            format: args.format,
        };
        (input.load()?, None)
    };
    let group = match &args.group {
        Some(path) => load_group(path)?,
        None => {
            let config = drift_config.as_ref().expect("clap enforces --group without --simulate");
            GroupConfig::new(
                "drift-sim",
                [drift_sim::GENERATED_CATEGORY.to_string()],
                (1..=config.max_iterations).map(|k| config.category_name(k)),
            )?
        }
    };

    let config = train_config(&args.strategy, &args.train, args.seed)?;
    let outcome = pipeline::run_pipeline(&dataset, &group, &config, None)?;

    let doc = ReportDocument {
        group: group.name().to_string(),
        strategy: outcome.model.strategy.clone(),
        lambda_star: outcome.model.lambda_spec.lambda,
        sections: vec![
            ReportSection {
                name: "train".to_string(),
                reports: outcome.train_reports.clone(),
            },
            ReportSection {
                name: "test".to_string(),
                reports: outcome.test_reports.clone(),
            },
        ],
    };

    if let Some(config) = &drift_config {
        write_dataset_with_manifest(&args.out, &dataset, config)?;
    }
    output::write_atomic(
        &args.out.join("model.json"),
        outcome.model.to_json().as_bytes(),
    )?;
    let curve = match &outcome.lambda_search {
        Some(search) => LambdaCurveDocument::from_search(search, args.strategy.resolved_target()),
        None => LambdaCurveDocument::fixed(&outcome.model.strategy),
    };
    output::write_atomic(
        &args.out.join("lambda_curve.json"),
        to_pretty_json(&curve).as_bytes(),
    )?;
    output::write_atomic(
        &args.out.join("report.csv"),
        output::report_csv(&outcome.test_reports).as_bytes(),
    )?;
    output::write_atomic(&args.out.join("report.json"), to_pretty_json(&doc).as_bytes())?;
    output::write_atomic(
        &args.out.join("overlap.csv"),
        output::overlap_csv(&outcome.overlap).as_bytes(),
    )?;
    let mut summary = output::render_summary(&doc);
    summary.push_str(&format!(
        "\nsplit: {} train / {} test in-group samples ({} outside the group)\n",
        outcome.train_size, outcome.test_size, outcome.dropped
    ));
    output::write_atomic(&args.out.join("summary.txt"), summary.as_bytes())?;
    print!("{summary}");
    Ok(())
}

fn cmd_report(args: ReportArgs) -> lossprov::Result<()> {
    let doc: ReportDocument =
        serde_json::from_slice(&std::fs::read(&args.input)?).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
    let summary = output::render_summary(&doc);
    match &args.out {
        Some(path) => output::write_atomic(path, summary.as_bytes())?,
        None => print!("{summary}"),
    }
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes")
}
