use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::KindHint;
use crate::error::{Error, Result};
use crate::metrics::SeraScheme;
use crate::resampling::{RateMode, ResampleSpec, Strategy};

/// A benchmark condition: no resampling, or one strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Condition {
    None,
    Resample(Strategy),
}

impl Condition {
    /// `none` followed by every strategy.
    pub fn all() -> Vec<Condition> {
        std::iter::once(Condition::None)
            .chain(Strategy::ALL.into_iter().map(Condition::Resample))
            .collect()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::None => f.write_str("none"),
            Condition::Resample(s) => s.fmt(f),
        }
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("none") {
            Ok(Condition::None)
        } else {
            s.parse().map(Condition::Resample)
        }
    }
}

impl TryFrom<String> for Condition {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Condition> for String {
    fn from(c: Condition) -> String {
        c.to_string()
    }
}

/// One hyperparameter combination of a strategy's grid. `k` and `delta`
/// fall back to the [`ResampleSpec`] defaults when absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub rates: RateMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl GridPoint {
    pub fn spec(&self, strategy: Strategy, threshold: f64) -> ResampleSpec {
        let mut spec = ResampleSpec::new(strategy);
        spec.threshold = threshold;
        spec.rates = self.rates;
        if let Some(k) = self.k {
            spec.k = k;
        }
        if let Some(delta) = self.delta {
            spec.delta = delta;
        }
        spec
    }
}

/// The hyperparameter grids of the original study.
pub fn default_grid(strategy: Strategy) -> Vec<GridPoint> {
    let modes = [RateMode::Balance, RateMode::Extreme];
    let ks = [3, 5, 7];
    let deltas: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let point = |rates, k, delta| GridPoint { rates, k, delta };
    match strategy {
        Strategy::RandomOver | Strategy::RandomUnder => modes.iter().map(|&m| point(m, None, None)).collect(),
        Strategy::SmoteR => modes
            .iter()
            .flat_map(|&m| ks.iter().map(move |&k| point(m, Some(k), None)))
            .collect(),
        Strategy::GaussianNoise => modes
            .iter()
            .flat_map(|&m| deltas.iter().map(move |&d| point(m, None, Some(d))))
            .collect(),
        Strategy::Smogn => {
            let mut grid = Vec::new();
            for &m in &modes {
                for &k in &ks {
                    grid.extend(deltas.iter().map(|&d| point(m, Some(k), Some(d))));
                }
            }
            grid
        }
        Strategy::Wercs => {
            let rates = [0.3, 0.5, 0.7, 0.9];
            rates
                .iter()
                .flat_map(|&under| {
                    rates
                        .iter()
                        .map(move |&over| point(RateMode::Explicit { under, over }, None, None))
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub path: PathBuf,
    pub target: String,
    /// Identifier in reports; defaults to the file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub kinds: BTreeMap<String, KindHint>,
}

impl DatasetEntry {
    pub fn id(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map_or_else(|| self.path.display().to_string(), |s| s.to_string_lossy().into_owned())
        })
    }

    pub fn hints(&self) -> HashMap<String, KindHint> {
        self.kinds.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

/// A condition and the grid its nested selection searches (empty for `none`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ConditionRepr")]
pub struct ConditionEntry {
    pub condition: Condition,
    pub grid: Vec<GridPoint>,
}

impl ConditionEntry {
    pub fn with_default_grid(condition: Condition) -> Self {
        let grid = match condition {
            Condition::None => Vec::new(),
            Condition::Resample(s) => default_grid(s),
        };
        ConditionEntry { condition, grid }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConditionRepr {
    Id(Condition),
    Full {
        condition: Condition,
        #[serde(default)]
        grid: Option<Vec<GridPoint>>,
    },
}

impl From<ConditionRepr> for ConditionEntry {
    fn from(r: ConditionRepr) -> Self {
        match r {
            ConditionRepr::Id(c)
            | ConditionRepr::Full {
                condition: c,
                grid: None,
            } => ConditionEntry::with_default_grid(c),
            ConditionRepr::Full {
                condition,
                grid: Some(grid),
            } => ConditionEntry { condition, grid },
        }
    }
}

fn default_conditions() -> Vec<ConditionEntry> {
    Condition::all()
        .into_iter()
        .map(ConditionEntry::with_default_grid)
        .collect()
}

fn d_folds() -> usize {
    10
}
fn d_repeats() -> usize {
    2
}
fn d_inner() -> usize {
    2
}
fn d_threshold() -> f64 {
    0.8
}
fn d_knn() -> usize {
    5
}
fn d_timeout() -> u64 {
    600
}
fn d_true() -> bool {
    true
}
fn d_p() -> f64 {
    0.5
}
fn d_beta() -> f64 {
    1.0
}

/// Benchmark configuration, usually read from JSON. Every field but
/// `datasets` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetEntry>,
    #[serde(default = "default_conditions")]
    pub strategies: Vec<ConditionEntry>,
    #[serde(default = "d_folds")]
    pub folds: usize,
    #[serde(default = "d_repeats")]
    pub repeats: usize,
    #[serde(default = "d_inner")]
    pub inner_folds: usize,
    #[serde(default = "d_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub seed: u64,
    /// Neighbours of the built-in kNN regressor.
    #[serde(default = "d_knn")]
    pub knn_k: usize,
    /// Wall-clock budget per outer run.
    #[serde(default = "d_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "d_true")]
    pub encode_nominals: bool,
    #[serde(default = "d_p")]
    pub p: f64,
    #[serde(default = "d_beta")]
    pub beta: f64,
    #[serde(default)]
    pub sera_scheme: SeraScheme,
}

impl ExperimentConfig {
    pub fn new(datasets: Vec<DatasetEntry>) -> Self {
        ExperimentConfig {
            datasets,
            strategies: default_conditions(),
            folds: d_folds(),
            repeats: d_repeats(),
            inner_folds: d_inner(),
            threshold: d_threshold(),
            seed: 0,
            knn_k: d_knn(),
            timeout_secs: d_timeout(),
            encode_nominals: true,
            p: d_p(),
            beta: d_beta(),
            sera_scheme: SeraScheme::ExactStep,
        }
    }

    /// Reads a JSON config; relative dataset paths are resolved against
    /// the config file's directory.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for d in &mut cfg.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.datasets.is_empty() {
            return bad("no datasets configured".into());
        }
        if self.strategies.is_empty() {
            return bad("no strategies configured".into());
        }
        if self.folds < 2 || self.inner_folds < 2 {
            return bad(format!(
                "folds ({}) and inner_folds ({}) must be at least 2",
                self.folds, self.inner_folds
            ));
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.knn_k == 0 {
            return bad("knn_k must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return bad(format!("threshold {} is outside (0, 1]", self.threshold));
        }
        if !(0.0..=1.0).contains(&self.p) || self.beta.is_nan() || self.beta <= 0.0 {
            return bad(format!("need 0 ≤ p ≤ 1 and beta > 0 (got {}, {})", self.p, self.beta));
        }
        let mut seen = std::collections::BTreeSet::new();
        for entry in &self.strategies {
            if !seen.insert(entry.condition) {
                return bad(format!("strategy {} listed twice", entry.condition));
            }
            match entry.condition {
                Condition::None => {}
                Condition::Resample(s) => {
                    if entry.grid.is_empty() {
                        return bad(format!("empty grid for {s}"));
                    }
                    for g in &entry.grid {
                        g.spec(s, self.threshold)
                            .validate()
                            .map_err(|e| Error::Config(format!("{s} grid point: {e}")))?;
                    }
                }
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for d in &self.datasets {
            if !ids.insert(d.id()) {
                return bad(format!("dataset id `{}` used twice", d.id()));
            }
        }
        Ok(())
    }
}
