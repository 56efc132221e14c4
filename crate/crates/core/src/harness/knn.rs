use crate::data::{Dataset, Row};
use crate::error::{Error, Result};
use crate::resampling::DistanceSchema;

/// k-nearest-neighbour regression: each prediction is the mean target of
/// the `k` closest training rows under `ds` (distance ties go to the lower
/// row index).
pub fn knn_regressor_fit_predict(train: &Dataset, test: &[Row], k: usize, ds: &DistanceSchema) -> Result<Vec<f64>> {
    if train.is_empty() {
        return Err(Error::InvalidSpec("kNN needs a non-empty training set".into()));
    }
    if k == 0 || k > train.len() {
        return Err(Error::InvalidSpec(format!(
            "kNN k = {k} must lie in 1..={}",
            train.len()
        )));
    }
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(train.len());
    Ok(test
        .iter()
        .map(|row| {
            dists.clear();
            dists.extend(train.rows().iter().enumerate().map(|(i, t)| (ds.distance(row, t), i)));
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < dists.len() {
                dists.select_nth_unstable_by(k - 1, cmp);
            }
            dists[..k].iter().map(|&(_, i)| train.row(i).target).sum::<f64>() / k as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, RngStream, Schema, Value};
    use rand::Rng;

    fn random(n: usize, seed: u64) -> Dataset {
        let mut rng = RngStream::new(seed, 0).rng();
        let schema = Schema::new(
            vec![
                Attribute::numeric("a"),
                Attribute::numeric("b"),
                Attribute::nominal("c", vec!["x".into(), "y".into(), "z".into()]),
            ],
            "t",
        )
        .unwrap();
        let rows = (0..n)
            .map(|_| {
                Row::new(
                    vec![
                        // coarse grid so distance ties occur
                        Value::Num(rng.random_range(0..5) as f64),
                        Value::Num(rng.random_range(0.0..1.0)),
                        Value::Cat(rng.random_range(0..3)),
                    ],
                    rng.random_range(-10.0..10.0),
                )
            })
            .collect();
        Dataset::new(schema, rows).unwrap()
    }

    #[test]
    fn full_neighbourhood_predicts_global_mean() {
        let d = random(20, 1);
        let ds = DistanceSchema::fit(&d);
        let mean = d.targets().iter().sum::<f64>() / 20.0;
        for p in knn_regressor_fit_predict(&d, &d.rows()[..5], 20, &ds).unwrap() {
            assert!((p - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn one_neighbour_recovers_training_target() {
        let d = random(20, 2);
        let ds = DistanceSchema::fit(&d);
        let p = knn_regressor_fit_predict(&d, &d.rows()[3..4], 1, &ds).unwrap();
        // a duplicate with lower index would win the tie; none expected here
        assert_eq!(p[0], d.row(3).target);
    }

    #[test]
    fn matches_exhaustive_scan() {
        let train = random(50, 3);
        let test = random(20, 4);
        let ds = DistanceSchema::fit(&train);
        let got = knn_regressor_fit_predict(&train, test.rows(), 3, &ds).unwrap();
        for (row, g) in test.rows().iter().zip(got) {
            // brute force: repeatedly take the nearest unused row
            let mut used = vec![false; train.len()];
            let mut sum = 0.0;
            for _ in 0..3 {
                let mut best: Option<(f64, usize)> = None;
                for (i, t) in train.rows().iter().enumerate() {
                    if used[i] {
                        continue;
                    }
                    let dist = ds.distance(row, t);
                    if best.is_none_or(|(bd, _)| dist < bd) {
                        best = Some((dist, i));
                    }
                }
                let (_, i) = best.unwrap();
                used[i] = true;
                sum += train.row(i).target;
            }
            assert!((g - sum / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_k() {
        let d = random(5, 5);
        let ds = DistanceSchema::fit(&d);
        assert!(knn_regressor_fit_predict(&d, d.rows(), 0, &ds).is_err());
        assert!(knn_regressor_fit_predict(&d, d.rows(), 6, &ds).is_err());
        let empty = d.subset(&[]);
        assert!(knn_regressor_fit_predict(&empty, d.rows(), 1, &ds).is_err());
    }
}
