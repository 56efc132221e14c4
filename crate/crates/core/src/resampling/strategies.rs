use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::synth::{interpolate, neighbours_by_distance, per_seed_counts, perturb, BinStats};
use super::{
    gen_synth_cases, make_bins, resolve_rates, scaled_count, Bin, DistanceSchema, ResampleSpec, Resampled, RowOrigin,
    Strategy,
};
use crate::data::{Dataset, RngStream, Row};
use crate::error::{Error, Result};
use crate::relevance::RelevanceFunction;

/// Which parts of the bin machinery a strategy uses.
struct Plan {
    under: bool,
    over: bool,
}

/// Shared driver: bins the data, resolves rates, keeps a uniform sample of
/// each normal bin (if `plan.under`) and asks `grow` for the new rows of
/// each rare bin (if `plan.over`). Output: kept originals in input order,
/// then generated rows in bin order.
fn run_bins<F>(
    d: &Dataset,
    rel: &RelevanceFunction,
    spec: &ResampleSpec,
    plan: Plan,
    rng: RngStream,
    mut grow: F,
) -> Result<Resampled>
where
    F: FnMut(&Bin, usize, &mut ChaCha8Rng) -> Result<Vec<(Row, RowOrigin)>>,
{
    spec.validate()?;
    let bins = make_bins(d, rel, spec.threshold)?;
    let rates = resolve_rates(spec.rates, &bins);
    let mut rng = rng.rng();

    let mut kept = vec![true; d.len()];
    let mut generated = Vec::new();
    for (bin, r) in bins.all().iter().zip(&rates) {
        if bin.rare {
            let count = scaled_count(r.over, bin.len());
            if plan.over && count > 0 {
                generated.extend(grow(bin, count, &mut rng)?);
            }
        } else if plan.under {
            let keep = scaled_count(r.keep, bin.len()).min(bin.len());
            let mut chosen = vec![false; bin.len()];
            for j in sample(&mut rng, bin.len(), keep) {
                chosen[j] = true;
            }
            for (&i, c) in bin.rows.iter().zip(chosen) {
                kept[i] = c;
            }
        }
    }

    let mut rows = Vec::with_capacity(d.len() + generated.len());
    let mut origins = Vec::with_capacity(rows.capacity());
    for (i, row) in d.rows().iter().enumerate() {
        if kept[i] {
            rows.push(row.clone());
            origins.push(RowOrigin::Original(i));
        }
    }
    for (row, origin) in generated {
        rows.push(row);
        origins.push(origin);
    }
    Ok(Resampled {
        data: Dataset::from_trusted(d.shared_schema(), rows),
        origins,
    })
}

fn check(spec: &ResampleSpec, expected: Strategy) -> Result<()> {
    if spec.strategy != expected {
        return Err(Error::InvalidSpec(format!(
            "spec is for {}, not {expected}",
            spec.strategy
        )));
    }
    Ok(())
}

fn replicate<R: Rng + ?Sized>(d: &Dataset, bin: &Bin, count: usize, rng: &mut R) -> Vec<(Row, RowOrigin)> {
    (0..count)
        .map(|_| {
            let i = bin.rows[rng.random_range(0..bin.len())];
            (d.row(i).clone(), RowOrigin::Replica(i))
        })
        .collect()
}

fn warn_single(bin: &Bin, strategy: Strategy) {
    log::warn!(
        "{strategy}: rare bin with a single row (row {}) has no neighbours; oversampling it by duplication",
        bin.rows[0]
    );
}

/// SmoteR: under-samples normal bins and grows rare bins with
/// interpolated cases.
pub fn smoter(d: &Dataset, rel: &RelevanceFunction, spec: &ResampleSpec, rng: RngStream) -> Result<Resampled> {
    check(spec, Strategy::SmoteR)?;
    let ds = DistanceSchema::fit(d);
    run_bins(
        d,
        rel,
        spec,
        Plan {
            under: true,
            over: true,
        },
        rng,
        |bin, count, rng| {
            if bin.len() < 2 {
                warn_single(bin, Strategy::SmoteR);
                return Ok(replicate(d, bin, count, rng));
            }
            gen_synth_cases(d, &bin.rows, count, spec.k, &ds, rng)
        },
    )
}

/// Random over-sampling: appends exact copies of rare rows, drawn with
/// replacement within each rare bin. Normal bins are untouched.
pub fn random_oversample(
    d: &Dataset,
    rel: &RelevanceFunction,
    spec: &ResampleSpec,
    rng: RngStream,
) -> Result<Resampled> {
    check(spec, Strategy::RandomOver)?;
    run_bins(
        d,
        rel,
        spec,
        Plan {
            under: false,
            over: true,
        },
        rng,
        |bin, count, rng| Ok(replicate(d, bin, count, rng)),
    )
}

/// Random under-sampling: keeps every rare row and a uniform sample of
/// each normal bin.
pub fn random_undersample(
    d: &Dataset,
    rel: &RelevanceFunction,
    spec: &ResampleSpec,
    rng: RngStream,
) -> Result<Resampled> {
    check(spec, Strategy::RandomUnder)?;
    run_bins(
        d,
        rel,
        spec,
        Plan {
            under: true,
            over: false,
        },
        rng,
        |_, _, _| Ok(Vec::new()),
    )
}

/// Introduction of Gaussian noise: under-samples normal bins and grows
/// rare bins with perturbed copies of their rows.
pub fn gaussian_noise(d: &Dataset, rel: &RelevanceFunction, spec: &ResampleSpec, rng: RngStream) -> Result<Resampled> {
    check(spec, Strategy::GaussianNoise)?;
    run_bins(
        d,
        rel,
        spec,
        Plan {
            under: true,
            over: true,
        },
        rng,
        |bin, count, rng| {
            let stats = BinStats::new(d, &bin.rows);
            let mut out = Vec::with_capacity(count);
            for (&seed, ng) in bin.rows.iter().zip(per_seed_counts(count, bin.len())) {
                for _ in 0..ng {
                    out.push((perturb(d, seed, &stats, spec.delta, rng), RowOrigin::Perturbed { seed }));
                }
            }
            Ok(out)
        },
    )
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// SMOGN: like SmoteR, but a case whose drawn neighbour lies farther than
/// half the median distance from the seed to its bin is generated by
/// Gaussian noise (amplitude `min(maxD, δ)`) instead of interpolation.
pub fn smogn(d: &Dataset, rel: &RelevanceFunction, spec: &ResampleSpec, rng: RngStream) -> Result<Resampled> {
    check(spec, Strategy::Smogn)?;
    let ds = DistanceSchema::fit(d);
    run_bins(
        d,
        rel,
        spec,
        Plan {
            under: true,
            over: true,
        },
        rng,
        |bin, count, rng| {
            if bin.len() < 2 {
                warn_single(bin, Strategy::Smogn);
                return Ok(replicate(d, bin, count, rng));
            }
            let k = spec.k.min(bin.len() - 1);
            let stats = BinStats::new(d, &bin.rows);
            let mut out = Vec::with_capacity(count);
            for (&seed, ng) in bin.rows.iter().zip(per_seed_counts(count, bin.len())) {
                if ng == 0 {
                    continue;
                }
                let nns = neighbours_by_distance(d, &bin.rows, seed, &ds);
                let dists: Vec<f64> = nns.iter().map(|&(_, dist)| dist).collect();
                let max_d = median(&dists) / 2.0;
                let pert = max_d.min(spec.delta);
                for _ in 0..ng {
                    let (neighbor, dist) = nns[rng.random_range(0..k)];
                    if dist <= max_d {
                        out.push((
                            interpolate(d, seed, neighbor, &ds, rng),
                            RowOrigin::Interpolated { seed, neighbor },
                        ));
                    } else {
                        out.push((perturb(d, seed, &stats, pert, rng), RowOrigin::Perturbed { seed }));
                    }
                }
            }
            Ok(out)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, Schema, Value};
    use crate::relevance::{pchip_fit, ControlPoint, ControlPointSet};
    use crate::resampling::RateMode;

    /// φ rises from 0 at y = 0 to 1 at y = 10; rare iff y ≥ ~7.
    fn ramp() -> RelevanceFunction {
        let cps = ControlPointSet::new(vec![
            ControlPoint::new(0.0, 0.0, 0.0),
            ControlPoint::new(10.0, 1.0, 0.0),
        ])
        .unwrap();
        pchip_fit(&cps)
    }

    /// 100 normal rows (y < 5) then 20 rare rows (y ≥ 9).
    fn skewed() -> Dataset {
        let schema = Schema::new(
            vec![
                Attribute::numeric("x"),
                Attribute::nominal("c", vec!["A".into(), "B".into()]),
            ],
            "y",
        )
        .unwrap();
        let mut rows = Vec::new();
        for i in 0..100 {
            rows.push(Row::new(vec![Value::Num(i as f64), Value::Cat(i % 2)], i as f64 * 0.04));
        }
        for i in 0..20 {
            rows.push(Row::new(
                vec![Value::Num(200.0 + i as f64), Value::Cat(i % 2)],
                9.0 + i as f64 * 0.05,
            ));
        }
        Dataset::new(schema, rows).unwrap()
    }

    fn rare_count(r: &Resampled, rel: &RelevanceFunction) -> usize {
        r.data.rows().iter().filter(|row| rel.eval(row.target) >= 0.8).count()
    }

    #[test]
    fn smoter_balance_reaches_sixty_sixty() {
        let (d, rel) = (skewed(), ramp());
        let r = smoter(&d, &rel, &ResampleSpec::new(Strategy::SmoteR), RngStream::new(1, 0)).unwrap();
        assert_eq!(r.data.len(), 120);
        assert_eq!(rare_count(&r, &rel), 60);
        assert_eq!(r.origins.iter().filter(|o| o.is_synthetic()).count(), 40);
    }

    #[test]
    fn identity_rates_reproduce_input() {
        let (d, rel) = (skewed(), ramp());
        for strategy in [
            Strategy::SmoteR,
            Strategy::RandomUnder,
            Strategy::GaussianNoise,
            Strategy::Smogn,
            Strategy::RandomOver,
        ] {
            let mut spec = ResampleSpec::new(strategy);
            spec.rates = RateMode::Explicit { under: 1.0, over: 0.0 };
            let r = resample_any(&d, &rel, &spec);
            assert_eq!(r.data.rows(), d.rows(), "{strategy}");
        }
    }

    fn resample_any(d: &Dataset, rel: &RelevanceFunction, spec: &ResampleSpec) -> Resampled {
        crate::resampling::resample(d, rel, spec, RngStream::new(9, 4)).unwrap()
    }

    #[test]
    fn ru_keeps_all_rare_rows() {
        let (d, rel) = (skewed(), ramp());
        let mut spec = ResampleSpec::new(Strategy::RandomUnder);
        spec.rates = RateMode::Explicit { under: 0.5, over: 0.0 };
        let r = resample_any(&d, &rel, &spec);
        assert_eq!(r.data.len(), 70);
        let rare_in: Vec<_> = d.rows()[100..].to_vec();
        let rare_out: Vec<_> = r
            .data
            .rows()
            .iter()
            .filter(|row| rel.eval(row.target) >= 0.8)
            .cloned()
            .collect();
        assert_eq!(rare_in, rare_out);
    }

    #[test]
    fn ro_replicas_are_exact_copies() {
        let (d, rel) = (skewed(), ramp());
        let mut spec = ResampleSpec::new(Strategy::RandomOver);
        spec.rates = RateMode::Explicit { under: 1.0, over: 2.0 };
        let r = resample_any(&d, &rel, &spec);
        assert_eq!(r.data.len(), 160);
        for (row, origin) in r.data.rows().iter().zip(&r.origins) {
            let (RowOrigin::Replica(i) | RowOrigin::Original(i)) = *origin else {
                panic!()
            };
            assert_eq!(row, d.row(i));
        }
    }

    #[test]
    fn gn_zero_delta_copies_seeds() {
        let (d, rel) = (skewed(), ramp());
        let mut spec = ResampleSpec::new(Strategy::GaussianNoise);
        spec.delta = 0.0;
        let r = resample_any(&d, &rel, &spec);
        for (row, origin) in r.data.rows().iter().zip(&r.origins) {
            if let RowOrigin::Perturbed { seed } = *origin {
                assert_eq!(row, d.row(seed));
            }
        }
    }

    #[test]
    fn gn_noise_is_centred_on_seed() {
        // one rare bin of two rows, 10⁴ perturbations of each
        let schema = Schema::new(vec![Attribute::numeric("x")], "y").unwrap();
        let mut rows: Vec<Row> = (0..10).map(|i| Row::new(vec![Value::Num(i as f64)], 1.0)).collect();
        rows.push(Row::new(vec![Value::Num(4.0)], 9.5));
        rows.push(Row::new(vec![Value::Num(6.0)], 9.8));
        let d = Dataset::new(schema, rows).unwrap();
        let mut spec = ResampleSpec::new(Strategy::GaussianNoise);
        spec.delta = 0.5;
        spec.rates = RateMode::Explicit {
            under: 1.0,
            over: 10_000.0,
        };
        let r = resample_any(&d, &ramp(), &spec);
        let xs: Vec<f64> = r
            .data
            .rows()
            .iter()
            .zip(&r.origins)
            .filter(|(_, o)| matches!(o, RowOrigin::Perturbed { seed: 10 }))
            .map(|(row, _)| row.values[0].as_num().unwrap())
            .collect();
        assert_eq!(xs.len(), 10_000);
        // sd within bin = √2, noise sd = 0.5·√2
        let se = 0.5 * 2f64.sqrt() / (xs.len() as f64).sqrt();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 4.0).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn smogn_duplicated_bin_interpolates_to_the_seed() {
        let schema = Schema::new(vec![Attribute::numeric("x")], "y").unwrap();
        let mut rows: Vec<Row> = (0..10).map(|i| Row::new(vec![Value::Num(i as f64)], 1.0)).collect();
        for _ in 0..3 {
            rows.push(Row::new(vec![Value::Num(7.0)], 9.5));
        }
        let d = Dataset::new(schema, rows).unwrap();
        let mut spec = ResampleSpec::new(Strategy::Smogn);
        spec.rates = RateMode::Explicit { under: 1.0, over: 3.0 };
        let r = resample_any(&d, &ramp(), &spec);
        let synth: Vec<_> = r
            .data
            .rows()
            .iter()
            .zip(&r.origins)
            .filter(|(_, o)| o.is_synthetic())
            .collect();
        assert_eq!(synth.len(), 9);
        for (row, origin) in synth {
            assert!(matches!(origin, RowOrigin::Interpolated { .. }));
            assert_eq!(row, d.row(10));
        }
    }

    #[test]
    fn smogn_outlier_neighbour_takes_noise_branch() {
        // rare bin {0, 0.1, 100} on x: for seed x = 0 the distances are
        // 0.001 and 1, so maxD = 0.25025 and the outlier is unsafe.
        let schema = Schema::new(vec![Attribute::numeric("x")], "y").unwrap();
        let mut rows: Vec<Row> = (0..10)
            .map(|i| Row::new(vec![Value::Num(i as f64 * 10.0)], 1.0))
            .collect();
        rows.push(Row::new(vec![Value::Num(0.0)], 9.5));
        rows.push(Row::new(vec![Value::Num(0.1)], 9.6));
        rows.push(Row::new(vec![Value::Num(100.0)], 9.7));
        let d = Dataset::new(schema, rows).unwrap();
        let ds = DistanceSchema::fit(&d);
        assert!((ds.distance(d.row(10), d.row(11)) - 0.001).abs() < 1e-12);
        assert!((ds.distance(d.row(10), d.row(12)) - 1.0).abs() < 1e-12);

        let mut spec = ResampleSpec::new(Strategy::Smogn);
        spec.rates = RateMode::Explicit {
            under: 1.0,
            over: 300.0,
        };
        let r = resample_any(&d, &ramp(), &spec);
        let mut saw_noise = false;
        for origin in &r.origins {
            match *origin {
                RowOrigin::Interpolated { seed: 10, neighbor } => assert_eq!(neighbor, 11),
                RowOrigin::Perturbed { seed: 10 } => saw_noise = true,
                _ => {}
            }
        }
        assert!(saw_noise);
    }

    #[test]
    fn single_row_rare_bin_is_duplicated() {
        let schema = Schema::new(vec![Attribute::numeric("x")], "y").unwrap();
        let mut rows: Vec<Row> = (0..10).map(|i| Row::new(vec![Value::Num(i as f64)], 1.0)).collect();
        rows.push(Row::new(vec![Value::Num(3.0)], 9.5));
        let d = Dataset::new(schema, rows).unwrap();
        let r = smoter(&d, &ramp(), &ResampleSpec::new(Strategy::SmoteR), RngStream::new(0, 0)).unwrap();
        for (row, origin) in r.data.rows().iter().zip(&r.origins) {
            if origin.is_synthetic() {
                assert_eq!(*origin, RowOrigin::Replica(10));
                assert_eq!(row, d.row(10));
            }
        }
    }

    #[test]
    fn wrong_strategy_is_rejected() {
        let (d, rel) = (skewed(), ramp());
        assert!(smoter(&d, &rel, &ResampleSpec::new(Strategy::RandomOver), RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn same_stream_same_output() {
        let (d, rel) = (skewed(), ramp());
        for s in Strategy::ALL {
            let spec = ResampleSpec::new(s);
            let a = crate::resampling::resample(&d, &rel, &spec, RngStream::new(42, 7)).unwrap();
            let b = crate::resampling::resample(&d, &rel, &spec, RngStream::new(42, 7)).unwrap();
            assert_eq!(a, b, "{s}");
        }
    }
}
