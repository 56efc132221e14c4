use super::PredictionBatch;
use crate::error::{Error, MetricSide, Result};
use crate::relevance::{bump_partition, BumpPartition, RelevanceFunction};

/// Relevance function, its bumps and the utility parameters.
#[derive(Debug, Clone)]
pub struct UtilityContext {
    rel: RelevanceFunction,
    bumps: BumpPartition,
    p: f64,
    threshold: f64,
    beta: f64,
}

impl UtilityContext {
    /// Context with `p = 0.5` and `β = 1`.
    pub fn new(rel: RelevanceFunction, threshold: f64) -> Result<Self> {
        UtilityContext::with_params(rel, threshold, 0.5, 1.0)
    }

    pub fn with_params(rel: RelevanceFunction, threshold: f64, p: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("p = {p} must lie in [0, 1]")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Config(format!("beta = {beta} must be positive")));
        }
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::Config(format!("threshold {threshold} is outside (0, 1]")));
        }
        let bumps = bump_partition(&rel);
        Ok(UtilityContext {
            rel,
            bumps,
            p,
            threshold,
            beta,
        })
    }

    pub fn rel(&self) -> &RelevanceFunction {
        &self.rel
    }

    pub fn bumps(&self) -> &BumpPartition {
        &self.bumps
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `L / limit` capped at 1; an exact prediction has no loss even when the
/// limit is 0 (true value sitting on a bump node).
fn bounded_loss(loss: f64, limit: f64) -> f64 {
    if loss == 0.0 {
        0.0
    } else if loss < limit {
        loss / limit
    } else {
        1.0
    }
}

/// Utility `U = φ(y)·(1 − Γ_B) − φ^p·Γ_C` of predicting `y_pred` for `y_true`.
///
/// Missing neighbour bumps at the edges of the domain count as infinitely
/// far away.
pub fn utility(y_pred: f64, y_true: f64, ctx: &UtilityContext) -> f64 {
    let bumps = ctx.bumps.bumps();
    let g = ctx.bumps.locate(y_true);
    let bump = bumps[g];
    let loss = (y_pred - y_true).abs();
    let below = y_pred < y_true;

    let node = if below { bump.lower } else { bump.upper };
    let ll_b = (y_true - node).abs();
    let gamma_b = bounded_loss(loss, bump.max_loss.min(ll_b));

    let neighbour = if below {
        g.checked_sub(1).map(|i| bumps[i].peak)
    } else {
        bumps.get(g + 1).map(|b| b.peak)
    };
    let ll_c = neighbour.map_or(f64::INFINITY, |b| (y_true - b).abs());
    let gamma_c = bounded_loss(loss, bump.max_loss.min(ll_c));

    let phi_y = ctx.rel.eval(y_true);
    let phi_p = (1.0 - ctx.p) * ctx.rel.eval(y_pred) + ctx.p * phi_y;
    phi_y * (1.0 - gamma_b) - phi_p * gamma_c
}

fn ratio<F>(batch: &PredictionBatch, ctx: &UtilityContext, side: MetricSide, select: F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let (mut num, mut den) = (0.0, 0.0);
    for (y, p) in batch.pairs() {
        let phi = ctx.rel.eval(select(y, p));
        if phi > ctx.threshold {
            num += 1.0 + utility(p, y, ctx);
            den += 1.0 + phi;
        }
    }
    if den == 0.0 {
        return Err(Error::UndefinedMetric { side });
    }
    Ok(num / den)
}

/// Utility-based precision over cases with `φ(ŷ) > t_R`.
pub fn precision_u(batch: &PredictionBatch, ctx: &UtilityContext) -> Result<f64> {
    ratio(batch, ctx, MetricSide::Precision, |_, p| p)
}

/// Utility-based recall over cases with `φ(y) > t_R`.
pub fn recall_u(batch: &PredictionBatch, ctx: &UtilityContext) -> Result<f64> {
    ratio(batch, ctx, MetricSide::Recall, |y, _| y)
}

/// `(β²+1)·P·R / (β²·P + R)`, 0 when `P = R = 0`.
pub fn f1_score(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let den = b2 * precision + recall;
    if den == 0.0 {
        0.0
    } else {
        (b2 + 1.0) * precision * recall / den
    }
}

pub fn f1_u(batch: &PredictionBatch, ctx: &UtilityContext) -> Result<f64> {
    Ok(f1_score(precision_u(batch, ctx)?, recall_u(batch, ctx)?, ctx.beta))
}
