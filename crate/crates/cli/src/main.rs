use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use imbreg::data::{load_csv, profile, read_csv, write_csv, Dataset, KindHint, RngStream};
use imbreg::harness::{run_experiment, write_reports, ExperimentConfig};
use imbreg::metrics::{evaluate, PredictionBatch, SeraScheme, UtilityContext};
use imbreg::relevance::{bump_partition, pchip_fit, ControlPointSet, RelevanceFunction};
use imbreg::resampling::{resample, RateMode, ResampleSpec, Strategy};

#[derive(Parser)]
#[command(
    name = "imbreg",
    version,
    about = "Resampling and evaluation for imbalanced regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarise a dataset: size, attribute kinds and rare-case counts.
    Profile(ProfileArgs),
    /// Fit a relevance function and print it as JSON.
    Relevance(RelevanceArgs),
    /// Resample a dataset with one strategy.
    Resample(ResampleArgs),
    /// Score predictions with MSE, MAE, utility-based F1 and SERA.
    Evaluate(EvaluateArgs),
    /// Run a cross-validated benchmark from a JSON config.
    Bench(BenchArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Name of the target column.
    #[arg(long)]
    target: String,
    /// Column kind override, e.g. `site=nominal` or `size=ordinal:small,medium,large`.
    #[arg(long = "kind", value_name = "COL=KIND")]
    kinds: Vec<String>,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let hints = parse_kinds(&self.kinds)?;
        load_csv(&self.data, &self.target, &hints).with_context(|| format!("loading {}", self.data.display()))
    }
}

#[derive(Args)]
struct RelSource {
    /// Saved relevance function (JSON from `imbreg relevance`).
    #[arg(long, conflicts_with = "control_points")]
    relevance: Option<PathBuf>,
    /// Control points CSV (`y,rel[,deriv]`); defaults to boxplot control points.
    #[arg(long)]
    control_points: Option<PathBuf>,
}

impl RelSource {
    fn resolve(&self, targets: Option<&[f64]>) -> Result<RelevanceFunction> {
        if let Some(p) = &self.relevance {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            return serde_json::from_reader(f).with_context(|| format!("reading {}", p.display()));
        }
        if let Some(p) = &self.control_points {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            return Ok(pchip_fit(&ControlPointSet::from_csv(f)?));
        }
        let targets = targets.ok_or_else(|| anyhow!("need --relevance, --control-points or a dataset to fit on"))?;
        Ok(RelevanceFunction::from_targets(targets)?)
    }
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    rel: RelSource,
    #[arg(long, default_value_t = 0.8)]
    threshold: f64,
}

#[derive(Args)]
struct RelevanceArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    rel: RelSource,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the bump partition.
    #[arg(long)]
    bumps: bool,
}

#[derive(Args)]
struct ResampleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    rel: RelSource,
    /// smt, ro, ru, gn, sg or wercs.
    #[arg(long)]
    strategy: Strategy,
    #[arg(long, default_value_t = 0.8)]
    threshold: f64,
    /// Rate mode when --u/--o are not given.
    #[arg(long, default_value = "balance", value_parser = ["balance", "extreme"])]
    rates: String,
    /// Kept fraction of each normal bin (WERCS: removed fraction of the data).
    #[arg(long)]
    u: Option<f64>,
    /// New rows per rare bin as a multiple of its size (WERCS: of the data).
    #[arg(long)]
    o: Option<f64>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.02)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
    /// Size report; defaults to the output path with a `.json` extension.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// CSV with true and predicted values.
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, default_value = "y_true")]
    true_col: String,
    #[arg(long, default_value = "y_pred")]
    pred_col: String,
    /// Dataset whose target fits the relevance function (boxplot).
    #[arg(long, requires = "target")]
    data: Option<PathBuf>,
    #[arg(long)]
    target: Option<String>,
    #[command(flatten)]
    rel: RelSource,
    #[arg(long, default_value_t = 0.8)]
    threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// `exact` or `trapezoid[:step]`.
    #[arg(long, default_value = "exact")]
    sera_scheme: SeraScheme,
    /// Include the SER curve sampled every STEP.
    #[arg(long, value_name = "STEP")]
    curve_step: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

fn parse_kinds(specs: &[String]) -> Result<HashMap<String, KindHint>> {
    specs
        .iter()
        .map(|s| {
            let (col, kind) = s
                .split_once('=')
                .ok_or_else(|| anyhow!("--kind `{s}` is not COL=KIND"))?;
            let hint = match kind.split_once(':') {
                None if kind == "numeric" => KindHint::Numeric,
                None if kind == "nominal" => KindHint::Nominal,
                Some(("ordinal", levels)) => {
                    KindHint::Ordinal(levels.split(',').map(|l| l.trim().to_string()).collect())
                }
                _ => bail!("unknown kind `{kind}` (numeric, nominal or ordinal:l1,l2,...)"),
            };
            Ok((col.to_string(), hint))
        })
        .collect()
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            // reader went away (e.g. `| head`)
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}

fn cmd_profile(a: ProfileArgs) -> Result<()> {
    let d = a.data.load()?;
    let rel = a.rel.resolve(Some(&d.targets()))?;
    let p = profile(&d, &rel, a.threshold);
    let mut v = serde_json::to_value(p)?;
    v["dataset"] = json!(a.data.data.display().to_string());
    v["threshold"] = json!(a.threshold);
    emit(&v, None)
}

fn cmd_relevance(a: RelevanceArgs) -> Result<()> {
    let d = a.data.load()?;
    let rel = a.rel.resolve(Some(&d.targets()))?;
    let mut v = serde_json::to_value(&rel)?;
    if a.bumps {
        v["bumps"] = serde_json::to_value(bump_partition(&rel).bumps())?;
    }
    emit(&v, a.out.as_deref())
}

fn cmd_resample(a: ResampleArgs) -> Result<()> {
    let d = a.data.load()?;
    let rel = a.rel.resolve(Some(&d.targets()))?;
    let mut spec = ResampleSpec::new(a.strategy);
    spec.threshold = a.threshold;
    spec.k = a.k;
    spec.delta = a.delta;
    spec.rates = match (a.u, a.o, a.strategy) {
        (None, None, Strategy::Wercs) => spec.rates,
        (None, None, _) if a.rates == "extreme" => RateMode::Extreme,
        (None, None, _) => RateMode::Balance,
        (u, o, Strategy::Wercs) => RateMode::Explicit {
            under: u.unwrap_or(0.0),
            over: o.unwrap_or(0.0),
        },
        (u, o, _) => RateMode::Explicit {
            under: u.unwrap_or(1.0),
            over: o.unwrap_or(0.0),
        },
    };
    let out = resample(&d, &rel, &spec, RngStream::new(a.seed, 0))?;
    write_csv(&a.out, &out.data).with_context(|| format!("writing {}", a.out.display()))?;

    let (before, after) = (d.len(), out.data.len());
    let sidecar = a.sidecar.unwrap_or_else(|| a.out.with_extension("json"));
    let report = json!({
        "input": a.data.data.display().to_string(),
        "output": a.out.display().to_string(),
        "strategy": a.strategy.id(),
        "spec": spec,
        "seed": a.seed,
        "input_size": before,
        "output_size": after,
        "pct_change": 100.0 * (after as f64 - before as f64) / before as f64,
        "synthetic_rows": out.origins.iter().filter(|o| o.is_synthetic()).count(),
    });
    emit(&report, Some(&sidecar))
}

fn read_predictions(path: &Path, true_col: &str, pred_col: &str) -> Result<PredictionBatch> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let d = read_csv(f, true_col, &HashMap::from([(pred_col.to_string(), KindHint::Numeric)]))
        .with_context(|| format!("reading {}", path.display()))?;
    let j = d
        .schema()
        .index_of(pred_col)
        .ok_or_else(|| anyhow!("{} has no `{pred_col}` column", path.display()))?;
    let pred = d
        .rows()
        .iter()
        .map(|r| r.values[j].as_num().unwrap_or(f64::NAN))
        .collect();
    Ok(PredictionBatch::new(d.targets(), pred)?)
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let batch = read_predictions(&a.predictions, &a.true_col, &a.pred_col)?;
    let fit_targets = match (&a.data, &a.target) {
        (Some(p), Some(t)) => Some(load_csv(p, t, &HashMap::new())?.targets()),
        _ => None,
    };
    let rel = a.rel.resolve(fit_targets.as_deref())?;
    let ctx = UtilityContext::with_params(rel, a.threshold, a.p, a.beta)?;
    let grid: Option<Vec<f64>> = a.curve_step.map(|h| {
        let n = (1.0 / h).round().max(1.0) as usize;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    });
    let report = evaluate(&batch, &ctx, a.sera_scheme, grid.as_deref());
    emit(&serde_json::to_value(report)?, None)
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let cfg = ExperimentConfig::from_json_file(&a.config)?;
    let result = run_experiment(&cfg)?;
    write_reports(&a.out, &result)?;
    let failed = result.records.iter().filter(|r| !r.succeeded()).count();
    let mut err = BufWriter::new(std::io::stderr());
    writeln!(
        err,
        "{} runs ({} failed) written to {}",
        result.records.len(),
        failed,
        a.out.display()
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // per-fold resampling warnings would flood a benchmark run
    let filter = match cli.command {
        Command::Bench(_) => "warn,imbreg::resampling=error",
        _ => "warn",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(filter)).init();
    let res = match cli.command {
        Command::Profile(a) => cmd_profile(a),
        Command::Relevance(a) => cmd_relevance(a),
        Command::Resample(a) => cmd_resample(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
