use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{knn_regressor_fit_predict, Condition, ConditionEntry, ExperimentConfig, GridPoint};
use crate::data::{encode_nominals, kfold_indices, load_csv, Dataset, RngStream, Split};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, sera, EvalReport, PredictionBatch, UtilityContext};
use crate::relevance::RelevanceFunction;
use crate::resampling::{resample, DistanceSchema, Resampled, RowOrigin};

/// Why an outer run produced no metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    Timeout { budget_secs: u64 },
    Relevance { message: String },
    Selection { message: String },
    Resampling { message: String },
    Model { message: String },
}

/// Outcome of one (dataset, condition, outer fold) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub condition: Condition,
    pub repeat: usize,
    pub fold: usize,
    /// Grid point chosen by the nested selection.
    pub params: Option<GridPoint>,
    /// Mean inner-fold SERA of the chosen grid point.
    pub selection_sera: Option<f64>,
    /// Other grid points that tied with the chosen one.
    pub selection_ties: usize,
    pub train_before: usize,
    pub train_after: Option<usize>,
    pub metrics: Option<EvalReport>,
    pub failure: Option<Failure>,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none() && self.metrics.is_some()
    }
}

/// Wall-clock time of one run, kept apart from [`RunRecord`] so records are
/// reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub dataset: String,
    pub condition: Condition,
    pub repeat: usize,
    pub fold: usize,
    pub wall_ms: u128,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub records: Vec<RunRecord>,
    pub timings: Vec<RunTiming>,
}

/// Dataset row indices that fed each stage of one outer run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FoldTrace {
    pub relevance_rows: Vec<usize>,
    pub selection_rows: Vec<usize>,
    pub training_rows: Vec<usize>,
}

/// Settings shared by every run of an experiment.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub threshold: f64,
    pub inner_folds: usize,
    pub knn_k: usize,
    pub p: f64,
    pub beta: f64,
    pub sera_scheme: crate::metrics::SeraScheme,
    pub budget: Duration,
}

impl RunSettings {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        RunSettings {
            threshold: cfg.threshold,
            inner_folds: cfg.inner_folds,
            knn_k: cfg.knn_k,
            p: cfg.p,
            beta: cfg.beta,
            sera_scheme: cfg.sera_scheme,
            budget: Duration::from_secs(cfg.timeout_secs),
        }
    }
}

struct Deadline {
    end: Instant,
    budget: Duration,
}

impl Deadline {
    fn check(&self) -> std::result::Result<(), Failure> {
        if Instant::now() > self.end {
            Err(Failure::Timeout {
                budget_secs: self.budget.as_secs(),
            })
        } else {
            Ok(())
        }
    }
}

/// Resamples `train`, treating "no rare rows" as a no-op.
fn resample_or_keep(
    train: &Dataset,
    rel: &RelevanceFunction,
    cond: Condition,
    grid: Option<&GridPoint>,
    threshold: f64,
    rng: RngStream,
) -> Result<Resampled> {
    let keep = || Resampled {
        data: train.clone(),
        origins: (0..train.len()).map(RowOrigin::Original).collect(),
    };
    match (cond, grid) {
        (Condition::Resample(s), Some(g)) => match resample(train, rel, &g.spec(s, threshold), rng) {
            Err(Error::NothingToResample { .. }) => {
                log::debug!("{s}: no rare rows in a training split; training on it unchanged");
                Ok(keep())
            }
            r => r,
        },
        _ => Ok(keep()),
    }
}

fn fit_predict(train: &Dataset, test: &Dataset, k: usize) -> Result<Vec<f64>> {
    let ds = DistanceSchema::fit(train);
    knn_regressor_fit_predict(train, test.rows(), k.min(train.len()), &ds)
}

/// Runs one outer fold: fits φ on the outer-train targets, picks the grid
/// point with the lowest mean inner-fold SERA (first one on ties),
/// resamples the outer-train split with it, trains the kNN regressor and
/// scores the untouched outer-test split.
#[allow(clippy::too_many_arguments)]
pub fn run_fold(
    data: &Dataset,
    dataset_id: &str,
    entry: &ConditionEntry,
    split: &Split,
    settings: &RunSettings,
    root: RngStream,
    coords: &[u64],
) -> (RunRecord, FoldTrace) {
    let deadline = Deadline {
        end: Instant::now() + settings.budget,
        budget: settings.budget,
    };
    let mut record = RunRecord {
        dataset: dataset_id.to_string(),
        condition: entry.condition,
        repeat: split.repeat,
        fold: split.fold,
        params: None,
        selection_sera: None,
        selection_ties: 0,
        train_before: split.train.len(),
        train_after: None,
        metrics: None,
        failure: None,
    };
    let mut trace = FoldTrace::default();
    if let Err(f) = run_fold_inner(
        data,
        entry,
        split,
        settings,
        root,
        coords,
        &deadline,
        &mut record,
        &mut trace,
    ) {
        record.failure = Some(f);
    }
    (record, trace)
}

#[allow(clippy::too_many_arguments)]
fn run_fold_inner(
    data: &Dataset,
    entry: &ConditionEntry,
    split: &Split,
    settings: &RunSettings,
    root: RngStream,
    coords: &[u64],
    deadline: &Deadline,
    record: &mut RunRecord,
    trace: &mut FoldTrace,
) -> std::result::Result<(), Failure> {
    let train = data.subset(&split.train);
    let test = data.subset(&split.test);

    let rel =
        RelevanceFunction::from_targets(&train.targets()).map_err(|e| Failure::Relevance { message: e.to_string() })?;
    trace.relevance_rows = split.train.clone();

    let cond_tag = entry.condition.to_string();
    let chosen = match entry.condition {
        Condition::None => None,
        Condition::Resample(_) => {
            let inner = kfold_indices(train.len(), settings.inner_folds, 1, root.derive("inner", coords))
                .map_err(|e| Failure::Selection { message: e.to_string() })?;
            trace.selection_rows = split.train.clone();
            let mut best: Option<(usize, f64)> = None;
            let mut ties = 0;
            let mut last_err = None;
            for (gi, g) in entry.grid.iter().enumerate() {
                let mut total = 0.0;
                let mut ok = true;
                for (fi, s) in inner.iter().enumerate() {
                    deadline.check()?;
                    let itrain = train.subset(&s.train);
                    let itest = train.subset(&s.test);
                    let mut c = coords.to_vec();
                    c.extend([gi as u64, fi as u64]);
                    let rng = root.derive(&format!("select/{cond_tag}"), &c);
                    let res = resample_or_keep(&itrain, &rel, entry.condition, Some(g), settings.threshold, rng)
                        .and_then(|r| fit_predict(&r.data, &itest, settings.knn_k))
                        .and_then(|pred| PredictionBatch::new(itest.targets(), pred));
                    match res {
                        Ok(batch) => {
                            let phi: Vec<f64> = batch.y_true().iter().map(|&y| rel.eval(y)).collect();
                            total += sera(&batch, &phi, settings.sera_scheme);
                        }
                        Err(e) => {
                            last_err = Some(e.to_string());
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let score = total / inner.len() as f64;
                match best {
                    Some((_, b)) if score == b => ties += 1,
                    Some((_, b)) if score > b => {}
                    _ => {
                        best = Some((gi, score));
                        ties = 0;
                    }
                }
            }
            let (gi, score) = best.ok_or_else(|| Failure::Selection {
                message: last_err.unwrap_or_else(|| "no grid point could be evaluated".into()),
            })?;
            record.params = Some(entry.grid[gi]);
            record.selection_sera = Some(score);
            record.selection_ties = ties;
            Some(entry.grid[gi])
        }
    };

    deadline.check()?;
    let resampled = resample_or_keep(
        &train,
        &rel,
        entry.condition,
        chosen.as_ref(),
        settings.threshold,
        root.derive(&format!("final/{cond_tag}"), coords),
    )
    .map_err(|e| Failure::Resampling { message: e.to_string() })?;
    let mut sources: Vec<usize> = resampled
        .origins
        .iter()
        .flat_map(|o| o.sources())
        .map(|i| split.train[i])
        .collect();
    sources.sort_unstable();
    sources.dedup();
    trace.training_rows = sources;
    record.train_after = Some(resampled.data.len());

    deadline.check()?;
    let pred =
        fit_predict(&resampled.data, &test, settings.knn_k).map_err(|e| Failure::Model { message: e.to_string() })?;
    let batch = PredictionBatch::new(test.targets(), pred).map_err(|e| Failure::Model { message: e.to_string() })?;
    let ctx = UtilityContext::with_params(rel, settings.threshold, settings.p, settings.beta)
        .map_err(|e| Failure::Relevance { message: e.to_string() })?;
    record.metrics = Some(evaluate(&batch, &ctx, settings.sera_scheme, None));
    Ok(())
}

/// Loads (and optionally encodes) every configured dataset.
pub fn load_datasets(cfg: &ExperimentConfig) -> Result<Vec<(String, Dataset)>> {
    cfg.datasets
        .iter()
        .map(|entry| {
            let d = load_csv(&entry.path, &entry.target, &entry.hints())?;
            let d = if cfg.encode_nominals { encode_nominals(&d) } else { d };
            Ok((entry.id(), d))
        })
        .collect()
}

/// Runs every (dataset, condition, outer fold) combination in parallel.
/// Records come back in that nesting order whatever the scheduling; run
/// failures are recorded, not raised.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let datasets = load_datasets(cfg)?;
    run_experiment_on(cfg, &datasets)
}

/// As [`run_experiment`] with the datasets already loaded.
pub fn run_experiment_on(cfg: &ExperimentConfig, datasets: &[(String, Dataset)]) -> Result<ExperimentResult> {
    let root = RngStream::new(cfg.seed, 0);
    let settings = RunSettings::from_config(cfg);

    let mut tasks = Vec::new();
    for (di, (id, data)) in datasets.iter().enumerate() {
        let splits = kfold_indices(data.len(), cfg.folds, cfg.repeats, root.derive("outer", &[di as u64]))
            .map_err(|e| Error::Config(format!("dataset `{id}`: {e}")))?;
        for entry in &cfg.strategies {
            for split in &splits {
                tasks.push((di, entry, split.clone()));
            }
        }
    }

    let out: Vec<(RunRecord, RunTiming)> = tasks
        .par_iter()
        .map(|(di, entry, split)| {
            let (id, data) = &datasets[*di];
            let start = Instant::now();
            let coords = [*di as u64, split.repeat as u64, split.fold as u64];
            let (record, _) = run_fold(data, id, entry, split, &settings, root, &coords);
            if let Some(f) = &record.failure {
                log::warn!("{id} {} r{} f{}: {f:?}", entry.condition, split.repeat, split.fold);
            }
            let timing = RunTiming {
                dataset: id.clone(),
                condition: entry.condition,
                repeat: split.repeat,
                fold: split.fold,
                wall_ms: start.elapsed().as_millis(),
            };
            (record, timing)
        })
        .collect();
    let (records, timings) = out.into_iter().unzip();
    Ok(ExperimentResult { records, timings })
}
