//! Relevance functions over a continuous target.
//!
//! `φ` is a monotone piecewise cubic Hermite interpolant through a small set
//! of control points, usually derived from the target's boxplot: the median
//! gets relevance 0 and the two adjacent limits relevance 1.

mod boxplot;
mod bumps;
mod pchip;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

pub use boxplot::{control_points_boxplot, quantile};
pub use bumps::{bump_partition, Bump, BumpPartition};
pub use pchip::{check_slopes, pchip_fit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    pub y: f64,
    pub rel: f64,
    #[serde(default)]
    pub deriv: f64,
}

impl ControlPoint {
    pub fn new(y: f64, rel: f64, deriv: f64) -> Self {
        ControlPoint { y, rel, deriv }
    }
}

/// At least two control points, strictly increasing in `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ControlPoint>", into = "Vec<ControlPoint>")]
pub struct ControlPointSet {
    points: Vec<ControlPoint>,
}

impl ControlPointSet {
    pub fn new(points: Vec<ControlPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::ControlPoints(format!(
                "need at least 2 control points, got {}",
                points.len()
            )));
        }
        for p in &points {
            if !(p.y.is_finite() && p.rel.is_finite() && p.deriv.is_finite()) {
                return Err(Error::ControlPoints(format!("non-finite control point {p:?}")));
            }
            if !(0.0..=1.0).contains(&p.rel) {
                return Err(Error::ControlPoints(format!(
                    "relevance {} at y = {} is outside [0, 1]",
                    p.rel, p.y
                )));
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[0].y >= w[1].y) {
            return Err(Error::ControlPoints(format!(
                "control points must be strictly increasing in y ({} then {})",
                w[0].y, w[1].y
            )));
        }
        Ok(ControlPointSet { points })
    }

    /// Reads `y,rel[,deriv]` rows (header optional).
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: Option<Vec<f64>> = rec.iter().map(|c| c.parse::<f64>().ok()).collect();
            match parsed {
                Some(v) if v.len() == 2 || v.len() == 3 => {
                    points.push(ControlPoint::new(v[0], v[1], v.get(2).copied().unwrap_or(0.0)))
                }
                None if i == 0 => continue, // header
                _ => {
                    return Err(Error::ControlPoints(format!(
                        "line {}: expected `y,rel[,deriv]`",
                        i + 1
                    )))
                }
            }
        }
        ControlPointSet::new(points)
    }

    pub fn points(&self) -> &[ControlPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl TryFrom<Vec<ControlPoint>> for ControlPointSet {
    type Error = Error;

    fn try_from(points: Vec<ControlPoint>) -> Result<Self> {
        ControlPointSet::new(points)
    }
}

impl From<ControlPointSet> for Vec<ControlPoint> {
    fn from(set: ControlPointSet) -> Self {
        set.points
    }
}

/// Cubic on `[y0, y1]`: `a + b·t + c·t² + d·t³` with `t = y − y0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub y0: f64,
    pub y1: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Segment {
    #[inline]
    pub fn eval_raw(&self, y: f64) -> f64 {
        let t = y - self.y0;
        self.a + t * (self.b + t * (self.c + t * self.d))
    }
}

/// Fitted relevance function. Serialises its control points and segment
/// coefficients; deserialisation refits from the control points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RelevanceRepr")]
pub struct RelevanceFunction {
    control_points: ControlPointSet,
    segments: Vec<Segment>,
}

#[derive(Deserialize)]
struct RelevanceRepr {
    control_points: ControlPointSet,
}

impl TryFrom<RelevanceRepr> for RelevanceFunction {
    type Error = Error;

    fn try_from(r: RelevanceRepr) -> Result<Self> {
        Ok(pchip_fit(&r.control_points))
    }
}

impl RelevanceFunction {
    pub(crate) fn from_parts(control_points: ControlPointSet, segments: Vec<Segment>) -> Self {
        RelevanceFunction {
            control_points,
            segments,
        }
    }

    /// Fits `φ` to `targets` with boxplot control points.
    pub fn from_targets(targets: &[f64]) -> Result<Self> {
        Ok(pchip_fit(&control_points_boxplot(targets)?))
    }

    pub fn control_points(&self) -> &ControlPointSet {
        &self.control_points
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn domain(&self) -> (f64, f64) {
        let pts = self.control_points.points();
        (pts[0].y, pts[pts.len() - 1].y)
    }

    /// `φ(y)`, clamped to `[0, 1]`; constant beyond the outer control points.
    pub fn eval(&self, y: f64) -> f64 {
        let pts = self.control_points.points();
        let first = &pts[0];
        let last = &pts[pts.len() - 1];
        if y.is_nan() {
            return 0.0;
        }
        if y <= first.y {
            return first.rel;
        }
        if y >= last.y {
            return last.rel;
        }
        let k = self.segments.partition_point(|s| s.y1 <= y);
        self.segments[k].eval_raw(y).clamp(0.0, 1.0)
    }
}

/// Splits `d` into rare (`φ(y) ≥ threshold`) and normal rows, keeping
/// row order within each part.
pub fn split_rare_normal(d: &Dataset, rel: &RelevanceFunction, threshold: f64) -> (Dataset, Dataset) {
    let (rare, normal): (Vec<usize>, Vec<usize>) = (0..d.len()).partition(|&i| rel.eval(d.row(i).target) >= threshold);
    (d.subset(&rare), d.subset(&normal))
}
