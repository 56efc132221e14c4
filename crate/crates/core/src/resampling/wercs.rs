use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{scaled_count, RateMode, ResampleSpec, Resampled, RowOrigin, Strategy};
use crate::data::{Dataset, RngStream};
use crate::error::{Error, Result};
use crate::relevance::RelevanceFunction;

/// Picks `count` distinct indices with probability proportional to
/// `weights` (Efraimidis–Spirakis keys `u^(1/w)`). Zero-weight items are
/// only taken, uniformly, once the positive-weight ones run out.
fn weighted_without_replacement<R: Rng + ?Sized>(weights: &[f64], count: usize, rng: &mut R) -> Vec<usize> {
    let mut keyed: Vec<(f64, f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let u: f64 = rng.random();
            if w > 0.0 {
                (1.0, u.ln() / w, i)
            } else {
                (0.0, u, i)
            }
        })
        .collect();
    // positive weights first, then larger key
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
    keyed.into_iter().take(count).map(|(_, _, i)| i).collect()
}

fn uniform_if_degenerate(mut w: Vec<f64>) -> Vec<f64> {
    if !w.iter().any(|&x| x > 0.0) {
        w.iter_mut().for_each(|x| *x = 1.0);
    }
    w
}

/// WERCS: appends `⌊o·|D|⌋` rows drawn with replacement with weights `φ`,
/// then removes `⌊u·|D|⌋` distinct original rows drawn with weights `1 − φ`.
/// Appended copies are never removed. If every weight in a direction is
/// zero, uniform weights are used instead.
pub fn wercs(d: &Dataset, rel: &RelevanceFunction, spec: &ResampleSpec, rng: RngStream) -> Result<Resampled> {
    if spec.strategy != Strategy::Wercs {
        return Err(Error::InvalidSpec(format!("spec is for {}, not WERCS", spec.strategy)));
    }
    spec.validate()?;
    let RateMode::Explicit { under, over } = spec.rates else {
        unreachable!("validated")
    };
    if d.is_empty() {
        return Err(Error::InvalidSpec("WERCS needs a non-empty dataset".into()));
    }
    let mut rng = rng.rng();
    let phi: Vec<f64> = d.rows().iter().map(|r| rel.eval(r.target)).collect();

    let w_over = uniform_if_degenerate(phi.clone());
    let w_under = uniform_if_degenerate(phi.iter().map(|p| 1.0 - p).collect());

    let n_over = scaled_count(over, d.len());
    let sampler = WeightedIndex::new(&w_over).expect("positive weights");
    let replicas: Vec<usize> = (0..n_over).map(|_| sampler.sample(&mut rng)).collect();

    let n_under = scaled_count(under, d.len()).min(d.len());
    let mut removed = vec![false; d.len()];
    for i in weighted_without_replacement(&w_under, n_under, &mut rng) {
        removed[i] = true;
    }

    let mut rows = Vec::with_capacity(d.len() - n_under + n_over);
    let mut origins = Vec::with_capacity(rows.capacity());
    for (i, row) in d.rows().iter().enumerate() {
        if !removed[i] {
            rows.push(row.clone());
            origins.push(RowOrigin::Original(i));
        }
    }
    for i in replicas {
        rows.push(d.row(i).clone());
        origins.push(RowOrigin::Replica(i));
    }
    Ok(Resampled {
        data: Dataset::from_trusted(d.shared_schema(), rows),
        origins,
    })
}
