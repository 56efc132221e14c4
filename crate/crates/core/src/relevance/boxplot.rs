use super::{ControlPoint, ControlPointSet};
use crate::error::{Error, Result};

/// Sample quantile by linear interpolation between order statistics
/// (`h = (n − 1)·p`). `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Control points from Tukey's boxplot: relevance 1 at both adjacent limits
/// `Q1 − 1.5·IQR` and `Q3 + 1.5·IQR`, relevance 0 at the median, all
/// derivatives 0.
pub fn control_points_boxplot(targets: &[f64]) -> Result<ControlPointSet> {
    if targets.is_empty() {
        return Err(Error::DegenerateDistribution("no target values".into()));
    }
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::DegenerateDistribution("non-finite target value".into()));
    }
    let mut sorted = targets.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    if iqr <= 0.0 {
        return Err(Error::DegenerateDistribution(format!(
            "interquartile range is zero (Q1 = Q3 = {q1})"
        )));
    }
    let adj_low = q1 - 1.5 * iqr;
    let adj_high = q3 + 1.5 * iqr;
    if !(adj_low < median && median < adj_high) {
        return Err(Error::DegenerateDistribution(format!(
            "median {median} coincides with an adjacent limit"
        )));
    }
    ControlPointSet::new(vec![
        ControlPoint::new(adj_low, 1.0, 0.0),
        ControlPoint::new(median, 0.0, 0.0),
        ControlPoint::new(adj_high, 1.0, 0.0),
    ])
}
