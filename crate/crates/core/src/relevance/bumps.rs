use serde::{Deserialize, Serialize};

use super::RelevanceFunction;

/// One bump of the target domain: the interval between two relevance
/// minima around a single relevance maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    /// Lower partition node `b⁻_i` (−∞ when φ peaks at the lower edge).
    pub lower: f64,
    /// Location of the maximum `b*_i`.
    pub peak: f64,
    /// Upper partition node `b⁻_{i+1}` (+∞ when φ peaks at the upper edge).
    pub upper: f64,
    /// Maximum admissible loss `b^Δ_i = 2·min(|b⁻_i − b*_i|, |b*_i − b⁻_{i+1}|)`.
    pub max_loss: f64,
}

impl Bump {
    fn new(lower: f64, peak: f64, upper: f64) -> Self {
        Bump {
            lower,
            peak,
            upper,
            max_loss: 2.0 * (peak - lower).abs().min((upper - peak).abs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpPartition {
    bumps: Vec<Bump>,
}

impl BumpPartition {
    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn len(&self) -> usize {
        self.bumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bumps.is_empty()
    }

    /// Index `γ(y)` of the bump containing `y`. Values outside the outer
    /// nodes belong to the nearest edge bump; a value on a shared node
    /// belongs to the upper bump.
    pub fn locate(&self, y: f64) -> usize {
        let i = self.bumps.partition_point(|b| b.upper <= y);
        i.min(self.bumps.len() - 1)
    }
}

const PLATEAU_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct Node {
    lo: f64,
    hi: f64,
    value: f64,
}

impl Node {
    /// Representative position: plateau midpoint, or the finite end of a
    /// plateau that runs off to infinity.
    fn position(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (false, true) => self.hi,
            (true, false) => self.lo,
            (false, false) => 0.0,
        }
    }
}

/// Roots of `b + 2c·t + 3d·t²` strictly inside `(0, h)`.
fn derivative_roots(b: f64, c: f64, d: f64, h: f64) -> Vec<f64> {
    let (qa, qb, qc) = (3.0 * d, 2.0 * c, b);
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    let mut roots = Vec::new();
    if scale == 0.0 {
        return roots;
    }
    if qa.abs() <= 1e-14 * scale {
        if qb != 0.0 {
            roots.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // numerically stable pair
            let q = -0.5 * (qb + qb.signum() * sq);
            if q != 0.0 {
                roots.push(q / qa);
                roots.push(qc / q);
            } else {
                roots.push(-qb / (2.0 * qa));
            }
        }
    }
    roots.retain(|t| t.is_finite() && *t > 0.0 && *t < h);
    roots
}

/// Scans `[lo, hi]` on a grid of `width·1e-4` for interior local extrema.
fn grid_extrema(rel: &RelevanceFunction, lo: f64, hi: f64) -> Vec<f64> {
    let (dlo, dhi) = rel.domain();
    let step = (dhi - dlo) * 1e-4;
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let ys: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vs: Vec<f64> = ys.iter().map(|&y| rel.eval(y)).collect();
    (1..n)
        .filter(|&i| (vs[i] - vs[i - 1]) * (vs[i + 1] - vs[i]) < 0.0)
        .map(|i| ys[i])
        .collect()
}

/// Bump partition of `φ`.
///
/// Extrema are located exactly: candidate points are the control points
/// plus the analytic roots of each segment's derivative (a grid scan at
/// 10⁻⁴ of the domain width stands in if a segment's coefficients are not
/// finite). Between consecutive candidates `φ` is monotone, so runs of
/// equal values are plateaus and extrema can be read off the sequence.
/// `φ` is constant beyond the domain, so the outermost plateaus extend to
/// ±∞. A constant `φ` yields one bump with unbounded admissible loss.
pub fn bump_partition(rel: &RelevanceFunction) -> BumpPartition {
    let mut candidates: Vec<f64> = rel.control_points().points().iter().map(|p| p.y).collect();
    for seg in rel.segments() {
        let h = seg.y1 - seg.y0;
        if [seg.b, seg.c, seg.d].iter().all(|v| v.is_finite()) {
            candidates.extend(derivative_roots(seg.b, seg.c, seg.d, h).into_iter().map(|t| seg.y0 + t));
        } else {
            candidates.extend(grid_extrema(rel, seg.y0, seg.y1));
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut nodes: Vec<Node> = Vec::new();
    for &y in &candidates {
        let value = rel.eval(y);
        match nodes.last_mut() {
            Some(last) if (last.value - value).abs() <= PLATEAU_TOL => last.hi = y,
            _ => nodes.push(Node { lo: y, hi: y, value }),
        }
    }
    nodes[0].lo = f64::NEG_INFINITY;
    nodes.last_mut().expect("at least two control points").hi = f64::INFINITY;

    if nodes.len() == 1 {
        let (lo, hi) = rel.domain();
        return BumpPartition {
            bumps: vec![Bump {
                lower: f64::NEG_INFINITY,
                peak: 0.5 * (lo + hi),
                upper: f64::INFINITY,
                max_loss: f64::INFINITY,
            }],
        };
    }

    // keep only extrema; consecutive values differ, so they alternate
    let mut extrema: Vec<(f64, bool)> = Vec::new(); // (position, is_max)
    for (i, node) in nodes.iter().enumerate() {
        let left = i.checked_sub(1).map(|j| nodes[j].value);
        let right = nodes.get(i + 1).map(|n| n.value);
        let above = |o: Option<f64>| o.is_none_or(|v| node.value > v);
        let below = |o: Option<f64>| o.is_none_or(|v| node.value < v);
        if above(left) && above(right) {
            extrema.push((node.position(), true));
        } else if below(left) && below(right) {
            extrema.push((node.position(), false));
        }
    }

    let mut bounds: Vec<f64> = Vec::new();
    let mut peaks: Vec<f64> = Vec::new();
    if extrema.first().is_some_and(|e| e.1) {
        bounds.push(f64::NEG_INFINITY);
    }
    for &(pos, is_max) in &extrema {
        if is_max {
            peaks.push(pos);
        } else {
            bounds.push(pos);
        }
    }
    if extrema.last().is_some_and(|e| e.1) {
        bounds.push(f64::INFINITY);
    }
    debug_assert_eq!(bounds.len(), peaks.len() + 1);

    let bumps = peaks
        .iter()
        .enumerate()
        .map(|(i, &peak)| Bump::new(bounds[i], peak, bounds[i + 1]))
        .collect();
    BumpPartition { bumps }
}
