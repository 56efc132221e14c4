use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PredictionBatch;
use crate::error::{Error, Result};

/// `SER_t` sampled at a list of cuts, as `(t, SER_t)` knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerCurve {
    pub knots: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scheme")]
pub enum SeraScheme {
    /// Exact integral of the step function `t ↦ SER_t`.
    #[default]
    ExactStep,
    /// Trapezoidal rule on the uniform grid `0, step, 2·step, …, 1`.
    Trapezoid { step: f64 },
}

impl fmt::Display for SeraScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeraScheme::ExactStep => f.write_str("exact"),
            SeraScheme::Trapezoid { step } => write!(f, "trapezoid:{step}"),
        }
    }
}

/// Parses `exact` or `trapezoid[:step]` (step defaults to 0.001).
impl FromStr for SeraScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("exact" | "exact-step" | "exact_step", None) => Ok(SeraScheme::ExactStep),
            ("trapezoid", arg) => {
                let step = match arg {
                    None => 1e-3,
                    Some(a) => a
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad trapezoid step `{a}`")))?,
                };
                if !(step > 0.0 && step <= 1.0) {
                    return Err(Error::Config(format!("trapezoid step {step} must lie in (0, 1]")));
                }
                Ok(SeraScheme::Trapezoid { step })
            }
            _ => Err(Error::Config(format!("unknown SERA scheme `{s}`"))),
        }
    }
}

fn ser_at(sq: &[(f64, f64)], t: f64) -> f64 {
    sq.iter().filter(|&&(phi, _)| phi >= t).map(|&(_, e)| e).sum()
}

fn squared(batch: &PredictionBatch, phi: &[f64]) -> Vec<(f64, f64)> {
    assert_eq!(phi.len(), batch.len(), "one relevance value per pair");
    batch
        .pairs()
        .zip(phi)
        .map(|((y, p), &f)| (f, (p - y) * (p - y)))
        .collect()
}

/// `SER_t = Σ_{φ(y_i) ≥ t} (ŷ_i − y_i)²` at each cut of `grid`.
pub fn ser_curve(batch: &PredictionBatch, phi: &[f64], grid: &[f64]) -> SerCurve {
    let sq = squared(batch, phi);
    SerCurve {
        knots: grid.iter().map(|&t| (t, ser_at(&sq, t))).collect(),
    }
}

/// Area under `t ↦ SER_t` over `[0, 1]`.
pub fn sera(batch: &PredictionBatch, phi: &[f64], scheme: SeraScheme) -> f64 {
    let mut sq = squared(batch, phi);
    match scheme {
        SeraScheme::ExactStep => {
            // SER_t is constant on (u_{j−1}, u_j] for the sorted distinct
            // positive φ values u_j, and 0 above the largest one.
            sq.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut tail: f64 = sq.iter().filter(|(f, _)| *f > 0.0).map(|(_, e)| e).sum();
            let mut area = 0.0;
            let mut prev = 0.0;
            let mut i = sq.partition_point(|(f, _)| *f <= 0.0);
            while i < sq.len() {
                let u = sq[i].0.min(1.0);
                area += (u - prev) * tail;
                prev = u;
                while i < sq.len() && sq[i].0.min(1.0) == u {
                    tail -= sq[i].1;
                    i += 1;
                }
            }
            area
        }
        SeraScheme::Trapezoid { step } => {
            let n = (1.0 / step).round().max(1.0) as usize;
            let h = 1.0 / n as f64;
            let vals: Vec<f64> = (0..=n).map(|k| ser_at(&sq, k as f64 * h)).collect();
            h * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[n]))
        }
    }
}
