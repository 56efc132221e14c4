use super::{AttrKind, Attribute, Codebook, Dataset, Schema, Value};

/// Replaces categorical attributes by integer codes.
///
/// Nominal columns get codes `0..k-1` in first-appearance order over the
/// rows; ordinal columns get `1..=k` following their declared level order.
/// The original labels are kept in each attribute's [`Codebook`]. Numeric
/// columns are untouched, so encoding an already encoded dataset is the
/// identity.
pub fn encode_nominals(d: &Dataset) -> Dataset {
    let schema = d.schema();
    if schema.attributes().iter().all(|a| a.kind.is_numeric()) {
        return d.clone();
    }

    // per column: old category index -> new numeric code
    let mut remap: Vec<Option<Vec<f64>>> = Vec::with_capacity(schema.len());
    let mut attributes = Vec::with_capacity(schema.len());
    for (j, attr) in schema.attributes().iter().enumerate() {
        match &attr.kind {
            AttrKind::Numeric => {
                remap.push(None);
                attributes.push(attr.clone());
            }
            AttrKind::Nominal { categories } => {
                let mut order: Vec<u32> = Vec::with_capacity(categories.len());
                let mut seen = vec![false; categories.len()];
                let observed = d.rows().iter().filter_map(|r| r.values[j].as_cat());
                let declared = 0..categories.len() as u32;
                for c in observed.chain(declared) {
                    if !seen[c as usize] {
                        seen[c as usize] = true;
                        order.push(c);
                    }
                }
                let mut codes = vec![0.0; categories.len()];
                for (code, &c) in order.iter().enumerate() {
                    codes[c as usize] = code as f64;
                }
                remap.push(Some(codes));
                attributes.push(Attribute {
                    name: attr.name.clone(),
                    kind: AttrKind::Numeric,
                    codebook: Some(Codebook {
                        categories: order.iter().map(|&c| categories[c as usize].clone()).collect(),
                        first_code: 0,
                        ordinal: false,
                    }),
                });
            }
            AttrKind::Ordinal { levels } => {
                remap.push(Some((1..=levels.len()).map(|v| v as f64).collect()));
                attributes.push(Attribute {
                    name: attr.name.clone(),
                    kind: AttrKind::Numeric,
                    codebook: Some(Codebook {
                        categories: levels.clone(),
                        first_code: 1,
                        ordinal: true,
                    }),
                });
            }
        }
    }

    let schema = Schema::new(attributes, schema.target()).expect("names unchanged");
    let rows = d
        .rows()
        .iter()
        .map(|r| {
            let values = r
                .values
                .iter()
                .zip(&remap)
                .map(|(v, map)| match (v, map) {
                    (Value::Cat(c), Some(codes)) => Value::Num(codes[*c as usize]),
                    (v, _) => *v,
                })
                .collect();
            super::Row::new(values, r.target)
        })
        .collect();
    Dataset::from_trusted(std::sync::Arc::new(schema), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Row;

    fn nums(d: &Dataset, j: usize) -> Vec<f64> {
        d.rows().iter().map(|r| r.values[j].as_num().unwrap()).collect()
    }

    #[test]
    fn nominal_codes_follow_first_appearance() {
        // declared order [A, B] but B appears first
        let schema = Schema::new(vec![Attribute::nominal("c", vec!["A".into(), "B".into()])], "y").unwrap();
        let rows = vec![
            Row::new(vec![Value::Cat(1)], 1.0),
            Row::new(vec![Value::Cat(0)], 2.0),
            Row::new(vec![Value::Cat(1)], 3.0),
        ];
        let d = Dataset::new(schema, rows).unwrap();
        let e = encode_nominals(&d);
        assert_eq!(nums(&e, 0), vec![0.0, 1.0, 0.0]);
        let cb = e.schema().attributes()[0].codebook.as_ref().unwrap();
        assert_eq!(cb.decode(0.0), Some("B"));
        assert_eq!(cb.decode(1.0), Some("A"));
    }

    #[test]
    fn ordinal_codes_start_at_one() {
        let levels = vec!["small".to_owned(), "medium".to_owned(), "large".to_owned()];
        let schema = Schema::new(vec![Attribute::ordinal("size", levels)], "y").unwrap();
        let rows = vec![
            Row::new(vec![Value::Cat(2)], 1.0),
            Row::new(vec![Value::Cat(0)], 2.0),
            Row::new(vec![Value::Cat(1)], 3.0),
        ];
        let e = encode_nominals(&Dataset::new(schema, rows).unwrap());
        assert_eq!(nums(&e, 0), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn numeric_only_dataset_is_unchanged_and_encoding_is_idempotent() {
        let schema = Schema::new(
            vec![
                Attribute::numeric("x"),
                Attribute::nominal("c", vec!["p".into(), "q".into()]),
            ],
            "y",
        )
        .unwrap();
        let rows = vec![
            Row::new(vec![Value::Num(0.5), Value::Cat(1)], 1.0),
            Row::new(vec![Value::Num(1.5), Value::Cat(0)], 2.0),
        ];
        let d = Dataset::new(schema, rows).unwrap();
        let once = encode_nominals(&d);
        assert_eq!(encode_nominals(&once), once);
        assert_eq!(nums(&once, 0), vec![0.5, 1.5]);
        // injective: distinct categories map to distinct codes
        assert_eq!(nums(&once, 1), vec![0.0, 1.0]);
    }
}
