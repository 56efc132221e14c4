use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::relevance::RelevanceFunction;

/// A maximal run of rows, consecutive in target order, sharing the same
/// rare/normal status. `rows` are indices into the source dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bin {
    pub rows: Vec<usize>,
    pub rare: bool,
}

impl Bin {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bins {
    pub(crate) bins: Vec<Bin>,
}

impl Bins {
    pub fn all(&self) -> &[Bin] {
        &self.bins
    }

    pub fn rare(&self) -> impl Iterator<Item = &Bin> {
        self.bins.iter().filter(|b| b.rare)
    }

    pub fn normal(&self) -> impl Iterator<Item = &Bin> {
        self.bins.iter().filter(|b| !b.rare)
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn total_rows(&self) -> usize {
        self.bins.iter().map(Bin::len).sum()
    }
}

/// Sorts rows by target (ties by row index) and cuts them into maximal
/// runs of equal rare/normal status.
pub fn make_bins(d: &Dataset, rel: &RelevanceFunction, threshold: f64) -> Result<Bins> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d.row(a).target.total_cmp(&d.row(b).target).then(a.cmp(&b)));

    let mut bins: Vec<Bin> = Vec::new();
    for i in order {
        let rare = rel.eval(d.row(i).target) >= threshold;
        match bins.last_mut() {
            Some(bin) if bin.rare == rare => bin.rows.push(i),
            _ => bins.push(Bin { rows: vec![i], rare }),
        }
    }
    if !bins.iter().any(|b| b.rare) {
        return Err(Error::NothingToResample { threshold });
    }
    Ok(Bins { bins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, Row, Schema, Value};
    use crate::relevance::{pchip_fit, ControlPoint, ControlPointSet};

    fn ramp() -> RelevanceFunction {
        pchip_fit(
            &ControlPointSet::new(vec![ControlPoint::new(0.0, 0.0, 0.0), ControlPoint::new(1.0, 1.0, 0.0)]).unwrap(),
        )
    }

    fn data(targets: &[f64]) -> Dataset {
        let schema = Schema::new(vec![Attribute::numeric("x")], "y").unwrap();
        Dataset::new(
            schema,
            targets.iter().map(|&t| Row::new(vec![Value::Num(t)], t)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn run_length_partition() {
        // sorted targets: 0.1 N, 0.2 N, 0.95 R, 0.99 R ... with a dip back to normal
        let rel = pchip_fit(
            &ControlPointSet::new(vec![
                ControlPoint::new(0.0, 0.0, 0.0),
                ControlPoint::new(2.0, 1.0, 0.0),
                ControlPoint::new(4.0, 0.0, 0.0),
            ])
            .unwrap(),
        );
        let d = data(&[3.9, 0.1, 2.0, 0.2, 2.1]);
        let bins = make_bins(&d, &rel, 0.8).unwrap();
        let shape: Vec<(bool, Vec<usize>)> = bins.all().iter().map(|b| (b.rare, b.rows.clone())).collect();
        assert_eq!(shape, vec![(false, vec![1, 3]), (true, vec![2, 4]), (false, vec![0])]);
    }

    #[test]
    fn all_rare_is_one_bin() {
        let bins = make_bins(&data(&[0.9, 0.95, 1.0]), &ramp(), 0.8).unwrap();
        assert_eq!(bins.len(), 1);
        assert_eq!(bins.normal().count(), 0);
        assert_eq!(bins.total_rows(), 3);
    }

    #[test]
    fn no_rare_rows_is_an_error() {
        assert!(matches!(
            make_bins(&data(&[0.1, 0.2]), &ramp(), 0.8),
            Err(Error::NothingToResample { .. })
        ));
    }
}
