use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::relevance::RelevanceFunction;

/// Table-style summary of a dataset at a relevance threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    #[serde(rename = "N")]
    pub n: usize,
    pub p_total: usize,
    pub p_nom: usize,
    pub p_num: usize,
    #[serde(rename = "nRare")]
    pub n_rare: usize,
    /// |rare| / |normal|; infinite when every row is rare.
    #[serde(rename = "IR")]
    pub imbalance_ratio: f64,
    #[serde(rename = "pctRare")]
    pub pct_rare: f64,
}

/// Counts rare rows (`φ(y) ≥ threshold`) over the whole dataset.
pub fn profile(d: &Dataset, rel: &RelevanceFunction, threshold: f64) -> DatasetProfile {
    let n = d.len();
    let n_rare = d.rows().iter().filter(|r| rel.eval(r.target) >= threshold).count();
    let p_nom = d
        .schema()
        .attributes()
        .iter()
        .filter(|a| a.is_categorical_origin())
        .count();
    let p_total = d.schema().len();
    let n_normal = n - n_rare;
    let imbalance_ratio = if n_rare == 0 {
        0.0
    } else if n_normal == 0 {
        f64::INFINITY
    } else {
        n_rare as f64 / n_normal as f64
    };
    DatasetProfile {
        n,
        p_total,
        p_nom,
        p_num: p_total - p_nom,
        n_rare,
        imbalance_ratio,
        pct_rare: if n == 0 { 0.0 } else { 100.0 * n_rare as f64 / n as f64 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, Row, Schema, Value};
    use crate::relevance::{pchip_fit, ControlPoint, ControlPointSet};

    fn ramp() -> RelevanceFunction {
        // φ(0) = 0, φ(1) = 0.5, φ(2) = 1
        let cps = ControlPointSet::new(vec![
            ControlPoint::new(0.0, 0.0, 0.0),
            ControlPoint::new(1.0, 0.5, 0.5),
            ControlPoint::new(2.0, 1.0, 0.0),
        ])
        .unwrap();
        pchip_fit(&cps)
    }

    fn dataset(targets: &[f64]) -> Dataset {
        let schema = Schema::new(
            vec![Attribute::numeric("x"), Attribute::nominal("c", vec!["a".into()])],
            "y",
        )
        .unwrap();
        let rows = targets
            .iter()
            .map(|&t| Row::new(vec![Value::Num(t), Value::Cat(0)], t))
            .collect();
        Dataset::new(schema, rows).unwrap()
    }

    #[test]
    fn threshold_count() {
        let rel = ramp();
        assert_eq!(rel.eval(1.0), 0.5);
        let p = profile(&dataset(&[0.0, 1.0, 2.0]), &rel, 0.8);
        assert_eq!(p.n_rare, 1);
        assert_eq!((p.p_total, p.p_nom, p.p_num), (2, 1, 1));
        assert!((p.imbalance_ratio - 0.5).abs() < 1e-15);
        assert!((p.pct_rare - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn no_rare_rows() {
        let p = profile(&dataset(&[0.0, 0.0, -1.0]), &ramp(), 0.8);
        assert_eq!(p.n_rare, 0);
        assert_eq!(p.imbalance_ratio, 0.0);
        assert_eq!(p.pct_rare, 0.0);
    }

    #[test]
    fn json_keys_are_exact() {
        let p = profile(&dataset(&[0.0, 1.0, 2.0]), &ramp(), 0.8);
        let v = serde_json::to_value(&p).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["IR", "N", "nRare", "p_nom", "p_num", "p_total", "pctRare"]);
    }
}
