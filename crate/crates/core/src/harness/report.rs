use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Condition, ExperimentResult, RunRecord};
use crate::error::{Error, Result};
use crate::metrics::EvalReport;

/// An aggregated metric and its direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Sera,
    Mse,
    Mae,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Sera, Metric::F1, Metric::Mse, Metric::Mae];

    pub fn higher_is_better(self) -> bool {
        matches!(self, Metric::F1)
    }

    pub fn value(self, r: &EvalReport) -> Option<f64> {
        match self {
            Metric::Sera => Some(r.sera),
            Metric::Mse => Some(r.mse),
            Metric::Mae => Some(r.mae),
            Metric::F1 => r.f1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Sera => "sera",
            Metric::Mse => "mse",
            Metric::Mae => "mae",
            Metric::F1 => "f1",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown metric `{s}`")))
    }
}

/// Conditions in order of first appearance.
fn conditions(records: &[RunRecord]) -> Vec<Condition> {
    let mut out: Vec<Condition> = Vec::new();
    for r in records {
        if !out.contains(&r.condition) {
            out.push(r.condition);
        }
    }
    out
}

/// Per dataset, the mean metric of every condition with at least one
/// successful run. Datasets are sorted by id.
fn means(records: &[RunRecord], metric: Metric) -> BTreeMap<&str, Vec<(Condition, f64)>> {
    let mut acc: BTreeMap<&str, Vec<(Condition, f64, usize)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.succeeded()) {
        let Some(v) = r.metrics.as_ref().and_then(|m| metric.value(m)) else {
            continue;
        };
        let list = acc.entry(r.dataset.as_str()).or_default();
        match list.iter_mut().find(|(c, _, _)| *c == r.condition) {
            Some(e) => {
                e.1 += v;
                e.2 += 1;
            }
            None => list.push((r.condition, v, 1)),
        }
    }
    acc.into_iter()
        .map(|(d, l)| (d, l.into_iter().map(|(c, s, n)| (c, s / n as f64)).collect()))
        .collect()
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Orients values so that smaller is better.
fn loss(metric: Metric, v: f64) -> f64 {
    if metric.higher_is_better() {
        -v
    } else {
        v
    }
}

/// Win counts: on each dataset the condition with the best mean metric
/// gets one point, `n` tied conditions get `1/n` each. Failed runs are left
/// out, so each dataset with any successful run hands out exactly one point.
pub fn win_table(records: &[RunRecord], metric: Metric) -> Vec<(Condition, f64)> {
    let mut wins: Vec<(Condition, f64)> = conditions(records).into_iter().map(|c| (c, 0.0)).collect();
    for (_, list) in means(records, metric) {
        let best = list.iter().map(|&(_, v)| loss(metric, v)).fold(f64::INFINITY, f64::min);
        let winners: Vec<Condition> = list
            .iter()
            .filter(|&&(_, v)| tied(loss(metric, v), best))
            .map(|&(c, _)| c)
            .collect();
        let share = 1.0 / winners.len() as f64;
        for w in winners {
            if let Some(e) = wins.iter_mut().find(|(c, _)| *c == w) {
                e.1 += share;
            }
        }
    }
    wins
}

/// Mean rank per condition (1 = best; ties share the mean of their ranks),
/// averaged over the datasets where the condition has results.
pub fn avg_rank(records: &[RunRecord], metric: Metric) -> Vec<(Condition, f64)> {
    let mut sums: Vec<(Condition, f64, usize)> = conditions(records).into_iter().map(|c| (c, 0.0, 0)).collect();
    for (_, mut list) in means(records, metric) {
        list.sort_by(|a, b| loss(metric, a.1).total_cmp(&loss(metric, b.1)));
        let mut i = 0;
        while i < list.len() {
            let mut j = i + 1;
            while j < list.len() && tied(loss(metric, list[i].1), loss(metric, list[j].1)) {
                j += 1;
            }
            // positions i..j (0-based) share rank mean of i+1..=j
            let rank = (i + 1 + j) as f64 / 2.0;
            for &(c, _) in &list[i..j] {
                if let Some(e) = sums.iter_mut().find(|(k, _, _)| *k == c) {
                    e.1 += rank;
                    e.2 += 1;
                }
            }
            i = j;
        }
    }
    sums.into_iter()
        .map(|(c, s, n)| (c, if n == 0 { f64::NAN } else { s / n as f64 }))
        .collect()
}

/// Training-set size change for one dataset and condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub dataset: String,
    pub condition: Condition,
    pub runs: usize,
    pub mean_train_before: f64,
    pub mean_train_after: f64,
    /// Mean over runs of `100·(after − before)/before`.
    pub pct_change: f64,
}

pub fn size_report(records: &[RunRecord]) -> Vec<SizeRow> {
    let mut acc: BTreeMap<(&str, Condition), (usize, f64, f64, f64)> = BTreeMap::new();
    for r in records {
        let Some(after) = r.train_after else { continue };
        let e = acc.entry((r.dataset.as_str(), r.condition)).or_default();
        let before = r.train_before as f64;
        e.0 += 1;
        e.1 += before;
        e.2 += after as f64;
        e.3 += 100.0 * (after as f64 - before) / before;
    }
    let order = conditions(records);
    let mut rows: Vec<SizeRow> = acc
        .into_iter()
        .map(|((d, c), (n, b, a, p))| SizeRow {
            dataset: d.to_string(),
            condition: c,
            runs: n,
            mean_train_before: b / n as f64,
            mean_train_after: a / n as f64,
            pct_change: p / n as f64,
        })
        .collect();
    rows.sort_by_key(|r| (r.dataset.clone(), order.iter().position(|&c| c == r.condition)));
    rows
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

/// Writes `runs.json`, `wins.csv`, `ranks.csv`, `sizes.csv`, `failures.csv`
/// and `timings.csv` into `dir`. Everything but `timings.csv` depends only
/// on the records.
pub fn write_reports(dir: &Path, result: &ExperimentResult) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let runs = dir.join("runs.json");
    let mut f = File::create(&runs).map_err(|e| Error::io(&runs, e))?;
    serde_json::to_writer_pretty(&mut f, &result.records)?;
    writeln!(f).map_err(|e| Error::io(&runs, e))?;

    let records = &result.records;
    let mut w = csv_writer(&dir.join("wins.csv"))?;
    w.write_record(["metric", "condition", "wins"])?;
    for m in Metric::ALL {
        for (c, v) in win_table(records, m) {
            w.write_record([m.name().to_string(), c.to_string(), v.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir.join("wins.csv"), e))?;

    let mut w = csv_writer(&dir.join("ranks.csv"))?;
    w.write_record(["metric", "condition", "avg_rank"])?;
    for m in Metric::ALL {
        for (c, v) in avg_rank(records, m) {
            w.write_record([m.name().to_string(), c.to_string(), v.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir.join("ranks.csv"), e))?;

    let mut w = csv_writer(&dir.join("sizes.csv"))?;
    for row in size_report(records) {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(dir.join("sizes.csv"), e))?;

    let mut w = csv_writer(&dir.join("failures.csv"))?;
    w.write_record(["dataset", "condition", "repeat", "fold", "reason"])?;
    for r in records {
        if let Some(f) = &r.failure {
            w.write_record([
                r.dataset.clone(),
                r.condition.to_string(),
                r.repeat.to_string(),
                r.fold.to_string(),
                serde_json::to_string(f)?,
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir.join("failures.csv"), e))?;

    let mut w = csv_writer(&dir.join("timings.csv"))?;
    for t in &result.timings {
        w.serialize(t)?;
    }
    w.flush().map_err(|e| Error::io(dir.join("timings.csv"), e))?;
    Ok(())
}
