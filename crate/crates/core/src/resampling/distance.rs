use crate::data::{Dataset, Row, Value};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Term {
    /// Absolute difference divided by the attribute's range (0 if the range is 0).
    Numeric { range: f64 },
    /// 0 if equal, 1 otherwise.
    Overlap,
}

/// Heterogeneous Euclidean-overlap distance over a dataset's attributes.
/// The target does not take part.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSchema {
    terms: Vec<Term>,
}

impl DistanceSchema {
    /// Numeric ranges are taken from `train`.
    pub fn fit(train: &Dataset) -> Self {
        let terms = train
            .schema()
            .attributes()
            .iter()
            .enumerate()
            .map(|(j, attr)| {
                if attr.kind.is_numeric() {
                    let (lo, hi) = train
                        .rows()
                        .iter()
                        .filter_map(|r| r.values[j].as_num())
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                    let range = if hi > lo { hi - lo } else { 0.0 };
                    Term::Numeric { range }
                } else {
                    Term::Overlap
                }
            })
            .collect();
        DistanceSchema { terms }
    }

    pub fn distance(&self, a: &Row, b: &Row) -> f64 {
        distance(a, b, self)
    }
}

/// `sqrt(Σ term²)` over attributes.
pub fn distance(a: &Row, b: &Row, ds: &DistanceSchema) -> f64 {
    let mut acc = 0.0;
    for ((va, vb), term) in a.values.iter().zip(&b.values).zip(&ds.terms) {
        let t = match (term, va, vb) {
            (Term::Numeric { range }, Value::Num(x), Value::Num(y)) => {
                if *range > 0.0 {
                    (x - y).abs() / range
                } else {
                    0.0
                }
            }
            (_, x, y) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
        };
        acc += t * t;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, Schema};
    use proptest::prelude::*;

    fn mixed(rows: &[(f64, u32, f64)]) -> Dataset {
        let schema = Schema::new(
            vec![
                Attribute::numeric("a"),
                Attribute::nominal("c", vec!["p".into(), "q".into(), "r".into()]),
                Attribute::numeric("b"),
            ],
            "y",
        )
        .unwrap();
        Dataset::new(
            schema,
            rows.iter()
                .map(|&(a, c, b)| Row::new(vec![Value::Num(a), Value::Cat(c), Value::Num(b)], 0.0))
                .collect(),
        )
        .unwrap()
    }

    /// Naive per-attribute recomputation from raw columns.
    fn oracle(d: &Dataset, i: usize, j: usize) -> f64 {
        let col = |k: usize| -> Vec<f64> { d.rows().iter().map(|r| r.values[k].as_num().unwrap()).collect() };
        let range = |v: &[f64]| {
            let mx = v.iter().cloned().fold(f64::MIN, f64::max);
            let mn = v.iter().cloned().fold(f64::MAX, f64::min);
            mx - mn
        };
        let (a, b) = (col(0), col(2));
        let (ra, rb) = (range(&a), range(&b));
        let ta = if ra == 0.0 { 0.0 } else { (a[i] - a[j]).abs() / ra };
        let tb = if rb == 0.0 { 0.0 } else { (b[i] - b[j]).abs() / rb };
        let tc = if d.row(i).values[1] == d.row(j).values[1] {
            0.0
        } else {
            1.0
        };
        (ta * ta + tb * tb + tc * tc).sqrt()
    }

    #[test]
    fn identical_rows_and_normalisation() {
        let d = mixed(&[(0.0, 0, 5.0), (10.0, 0, 5.0), (3.0, 1, 5.0)]);
        let ds = DistanceSchema::fit(&d);
        assert_eq!(ds.distance(d.row(0), d.row(0)), 0.0);
        // b has zero range → term 0; a spans the full range → 1
        assert_eq!(ds.distance(d.row(0), d.row(1)), 1.0);
        let expect = (0.3f64 * 0.3 + 1.0).sqrt();
        assert!((ds.distance(d.row(0), d.row(2)) - expect).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn matches_naive_oracle(
            rows in prop::collection::vec((-50.0f64..50.0, 0u32..3, -1.0f64..1.0), 2..20),
            i in 0usize..20, j in 0usize..20
        ) {
            let d = mixed(&rows);
            let (i, j) = (i % d.len(), j % d.len());
            let ds = DistanceSchema::fit(&d);
            let got = ds.distance(d.row(i), d.row(j));
            prop_assert!((got - oracle(&d, i, j)).abs() < 1e-12);
            prop_assert_eq!(got, ds.distance(d.row(j), d.row(i)));
            prop_assert!(got >= 0.0);
        }
    }
}
