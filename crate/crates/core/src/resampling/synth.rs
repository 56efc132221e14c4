use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DistanceSchema, RowOrigin};
use crate::data::{Dataset, Row, Value};
use crate::error::{Error, Result};

/// Splits `total` new rows over `n` seeds: `total / n` each, the first
/// `total mod n` seeds get one more.
pub(crate) fn per_seed_counts(total: usize, n: usize) -> Vec<usize> {
    let (base, extra) = (total / n, total % n);
    (0..n).map(|i| base + usize::from(i < extra)).collect()
}

/// Other members of `bin` ordered by distance to `seed` (ties by row index).
pub(crate) fn neighbours_by_distance(
    d: &Dataset,
    bin: &[usize],
    seed: usize,
    ds: &DistanceSchema,
) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = bin
        .iter()
        .filter(|&&j| j != seed)
        .map(|&j| (j, ds.distance(d.row(seed), d.row(j))))
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    out
}

/// SmoteR interpolation between `seed` and `neighbor`: numeric attributes
/// at a random point of the segment between the parents, nominal values
/// picked from either parent, target weighted by inverse distance to the
/// parents (their mean when both distances are 0).
pub(crate) fn interpolate<R: Rng + ?Sized>(
    d: &Dataset,
    seed: usize,
    neighbor: usize,
    ds: &DistanceSchema,
    rng: &mut R,
) -> Row {
    let (s, n) = (d.row(seed), d.row(neighbor));
    let values = s
        .values
        .iter()
        .zip(&n.values)
        .map(|(a, b)| match (a, b) {
            (Value::Num(x), Value::Num(y)) => {
                let r: f64 = rng.random();
                let v = x + r * (y - x);
                Value::Num(v.clamp(x.min(*y), x.max(*y)))
            }
            _ => {
                if rng.random_bool(0.5) {
                    *a
                } else {
                    *b
                }
            }
        })
        .collect();
    let mut new = Row::new(values, 0.0);
    let d1 = ds.distance(&new, s);
    let d2 = ds.distance(&new, n);
    new.target = if d1 + d2 == 0.0 {
        0.5 * (s.target + n.target)
    } else {
        (d2 * s.target + d1 * n.target) / (d1 + d2)
    };
    new
}

/// Within-bin statistics used by Gaussian-noise generation.
pub(crate) struct BinStats {
    /// Sample standard deviation per numeric attribute (0 for nominal).
    sd: Vec<f64>,
    target_sd: f64,
    /// Category frequency sampler per nominal attribute.
    categories: Vec<Option<WeightedIndex<usize>>>,
}

fn sample_sd(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    if n < 2 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

impl BinStats {
    pub(crate) fn new(d: &Dataset, bin: &[usize]) -> Self {
        let attrs = d.schema().attributes();
        let mut sd = vec![0.0; attrs.len()];
        let mut categories = Vec::with_capacity(attrs.len());
        for (j, attr) in attrs.iter().enumerate() {
            match attr.kind.categories() {
                None => {
                    sd[j] = sample_sd(bin.iter().map(|&i| d.row(i).values[j].as_num().unwrap_or(0.0)));
                    categories.push(None);
                }
                Some(cats) => {
                    let mut counts = vec![0usize; cats.len()];
                    for &i in bin {
                        if let Value::Cat(c) = d.row(i).values[j] {
                            counts[c as usize] += 1;
                        }
                    }
                    categories.push(WeightedIndex::new(counts).ok());
                }
            }
        }
        let target_sd = sample_sd(bin.iter().map(|&i| d.row(i).target));
        BinStats {
            sd,
            target_sd,
            categories,
        }
    }
}

/// Gaussian-noise copy of `seed`: numeric attributes and the target get
/// additive noise `N(0, amplitude·sd)` with `sd` taken within the bin;
/// nominal attributes are redrawn from the bin's category frequencies.
/// With `amplitude = 0` the copy is exact.
pub(crate) fn perturb<R: Rng + ?Sized>(d: &Dataset, seed: usize, stats: &BinStats, amplitude: f64, rng: &mut R) -> Row {
    let s = d.row(seed);
    if amplitude == 0.0 {
        return s.clone();
    }
    let values = s
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| match v {
            Value::Num(x) => {
                let z: f64 = rng.sample(StandardNormal);
                Value::Num(x + amplitude * stats.sd[j] * z)
            }
            Value::Cat(c) => match &stats.categories[j] {
                Some(w) => Value::Cat(w.sample(rng) as u32),
                None => Value::Cat(*c),
            },
        })
        .collect();
    let z: f64 = rng.sample(StandardNormal);
    Row::new(values, s.target + amplitude * stats.target_sd * z)
}

/// Generates `count` SmoteR cases from the rows of one rare bin.
///
/// Seeds are the bin's rows in order; each gets `count / |bin|` cases and
/// the first `count mod |bin|` seeds one extra. Each case interpolates the
/// seed with one of its `k` nearest neighbours inside the bin (`k` is
/// capped at `|bin| − 1`).
pub fn gen_synth_cases<R: Rng + ?Sized>(
    d: &Dataset,
    bin: &[usize],
    count: usize,
    k: usize,
    ds: &DistanceSchema,
    rng: &mut R,
) -> Result<Vec<(Row, RowOrigin)>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if bin.len() < 2 {
        return Err(Error::NoNeighbours { size: bin.len() });
    }
    if k == 0 {
        return Err(Error::InvalidSpec("k must be at least 1".into()));
    }
    let k = k.min(bin.len() - 1);
    let mut out = Vec::with_capacity(count);
    for (&seed, ng) in bin.iter().zip(per_seed_counts(count, bin.len())) {
        if ng == 0 {
            continue;
        }
        let nns = neighbours_by_distance(d, bin, seed, ds);
        for _ in 0..ng {
            let (neighbor, _) = nns[rng.random_range(0..k)];
            out.push((
                interpolate(d, seed, neighbor, ds, rng),
                RowOrigin::Interpolated { seed, neighbor },
            ));
        }
    }
    Ok(out)
}
