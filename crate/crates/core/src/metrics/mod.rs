//! Rarity-aware evaluation of numeric predictions.
//!
//! Utility-based precision, recall and F1 only look at cases whose
//! relevance exceeds a threshold; SERA integrates the squared error over
//! every relevance cut and needs no threshold.

mod sera;
mod utility;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sera::{ser_curve, sera, SerCurve, SeraScheme};
pub use utility::{f1_score, f1_u, precision_u, recall_u, utility, UtilityContext};

/// Paired true and predicted values; non-empty and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionBatch {
    y_true: Vec<f64>,
    y_pred: Vec<f64>,
}

impl PredictionBatch {
    pub fn new(y_true: Vec<f64>, y_pred: Vec<f64>) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::InvalidBatch(format!(
                "{} true values but {} predictions",
                y_true.len(),
                y_pred.len()
            )));
        }
        if y_true.is_empty() {
            return Err(Error::InvalidBatch("empty batch".into()));
        }
        if let Some(i) = y_true.iter().chain(&y_pred).position(|v| !v.is_finite()) {
            return Err(Error::InvalidBatch(format!(
                "non-finite value at position {}",
                i % y_true.len()
            )));
        }
        Ok(PredictionBatch { y_true, y_pred })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (y_true, y_pred) = pairs.into_iter().unzip();
        PredictionBatch::new(y_true, y_pred)
    }

    pub fn y_true(&self) -> &[f64] {
        &self.y_true
    }

    pub fn y_pred(&self) -> &[f64] {
        &self.y_pred
    }

    /// `(y_true, y_pred)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.y_true.iter().copied().zip(self.y_pred.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.y_true.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_true.is_empty()
    }
}

pub fn mse(batch: &PredictionBatch) -> f64 {
    batch.pairs().map(|(y, p)| (p - y) * (p - y)).sum::<f64>() / batch.len() as f64
}

pub fn mae(batch: &PredictionBatch) -> f64 {
    batch.pairs().map(|(y, p)| (p - y).abs()).sum::<f64>() / batch.len() as f64
}

/// Every metric for one batch. Precision, recall and F1 are `None` when
/// their selection is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mse: f64,
    pub mae: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub sera: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ser_curve: Option<SerCurve>,
}

/// Computes an [`EvalReport`]; `curve_grid` adds the SER curve at those cuts.
pub fn evaluate(
    batch: &PredictionBatch,
    ctx: &UtilityContext,
    scheme: SeraScheme,
    curve_grid: Option<&[f64]>,
) -> EvalReport {
    let phi: Vec<f64> = batch.y_true().iter().map(|&y| ctx.rel().eval(y)).collect();
    let precision = precision_u(batch, ctx).ok();
    let recall = recall_u(batch, ctx).ok();
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) => Some(f1_score(p, r, ctx.beta())),
        _ => None,
    };
    EvalReport {
        mse: mse(batch),
        mae: mae(batch),
        precision,
        recall,
        f1,
        sera: sera(batch, &phi, scheme),
        ser_curve: curve_grid.map(|g| ser_curve(batch, &phi, g)),
    }
}
