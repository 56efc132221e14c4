use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AttrKind, Attribute, Dataset, Row, Schema, Value};
use crate::error::{Error, Result};

/// Overrides the inferred kind of a column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindHint {
    Numeric,
    Nominal,
    /// Ordinal with the given level order.
    Ordinal(Vec<String>),
}

/// Reads a headered CSV file. A column is numeric iff every cell parses as
/// a finite real number, otherwise it is nominal; `hints` override that
/// inference per column. Row order is preserved. Empty cells are rejected.
pub fn load_csv(path: impl AsRef<Path>, target: &str, hints: &HashMap<String, KindHint>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, target, hints)
}

pub fn read_csv<R: Read>(reader: R, target: &str, hints: &HashMap<String, KindHint>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(Error::EmptyFile),
    };
    let header: Vec<String> = header.iter().map(str::to_owned).collect();
    let target_col = header
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| Error::MissingTarget(target.to_owned()))?;

    let mut cells: Vec<Vec<String>> = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        // blank trailing lines come through as a single empty field
        if rec.len() == 1 && rec[0].is_empty() && header.len() > 1 {
            continue;
        }
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i,
                expected: header.len(),
                found: rec.len(),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    row: i,
                    column: header[j].clone(),
                });
            }
        }
        cells.push(rec.iter().map(str::to_owned).collect());
    }
    if cells.is_empty() {
        return Err(Error::EmptyFile);
    }

    let mut targets = Vec::with_capacity(cells.len());
    for (i, rec) in cells.iter().enumerate() {
        let raw = &rec[target_col];
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => targets.push(v),
            _ => {
                return Err(Error::UnparseableTarget {
                    row: i,
                    value: raw.clone(),
                })
            }
        }
    }

    let attr_cols: Vec<usize> = (0..header.len()).filter(|&j| j != target_col).collect();
    let mut attributes = Vec::with_capacity(attr_cols.len());
    let mut columns: Vec<Vec<Value>> = Vec::with_capacity(attr_cols.len());
    for &j in &attr_cols {
        let name = &header[j];
        let column: Vec<&str> = cells.iter().map(|r| r[j].as_str()).collect();
        let (attr, values) = build_column(name, &column, hints.get(name))?;
        attributes.push(attr);
        columns.push(values);
    }

    let schema = Schema::new(attributes, target)?;
    let rows = targets
        .into_iter()
        .enumerate()
        .map(|(i, t)| Row::new(columns.iter().map(|c| c[i]).collect(), t))
        .collect();
    Dataset::new(schema, rows)
}

fn parse_finite(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn build_column(name: &str, cells: &[&str], hint: Option<&KindHint>) -> Result<(Attribute, Vec<Value>)> {
    let all_numeric = cells.iter().all(|c| parse_finite(c).is_some());
    match hint {
        Some(KindHint::Numeric) | None if all_numeric => {
            let values = cells
                .iter()
                .map(|c| Value::Num(parse_finite(c).expect("checked above")))
                .collect();
            Ok((Attribute::numeric(name), values))
        }
        Some(KindHint::Numeric) => {
            let (row, bad) = cells
                .iter()
                .enumerate()
                .find(|(_, c)| parse_finite(c).is_none())
                .expect("column is not all numeric");
            Err(Error::InvalidCell {
                row,
                column: name.to_owned(),
                value: (*bad).to_owned(),
            })
        }
        Some(KindHint::Ordinal(levels)) => {
            let mut values = Vec::with_capacity(cells.len());
            for (row, c) in cells.iter().enumerate() {
                let idx = levels.iter().position(|l| l == c).ok_or_else(|| Error::InvalidCell {
                    row,
                    column: name.to_owned(),
                    value: (*c).to_owned(),
                })?;
                values.push(Value::Cat(idx as u32));
            }
            Ok((Attribute::ordinal(name, levels.clone()), values))
        }
        Some(KindHint::Nominal) | None => {
            let mut categories: Vec<String> = Vec::new();
            let mut index: HashMap<&str, u32> = HashMap::new();
            let mut values = Vec::with_capacity(cells.len());
            for c in cells {
                let code = *index.entry(c).or_insert_with(|| {
                    categories.push((*c).to_owned());
                    (categories.len() - 1) as u32
                });
                values.push(Value::Cat(code));
            }
            Ok((Attribute::nominal(name, categories), values))
        }
    }
}

/// Writes `d` as CSV: attribute columns in schema order, target last.
/// Numbers use the shortest representation that parses back exactly.
pub fn write_csv(path: impl AsRef<Path>, d: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(file, d)
}

pub fn write_csv_to<W: Write>(writer: W, d: &Dataset) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let schema = d.schema();
    let mut header: Vec<&str> = schema.attributes().iter().map(|a| a.name.as_str()).collect();
    header.push(schema.target());
    wtr.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for row in d.rows() {
        record.clear();
        for (attr, v) in schema.attributes().iter().zip(&row.values) {
            record.push(match (v, &attr.kind) {
                (Value::Num(x), _) => x.to_string(),
                (Value::Cat(c), AttrKind::Nominal { categories }) => categories[*c as usize].clone(),
                (Value::Cat(c), AttrKind::Ordinal { levels }) => levels[*c as usize].clone(),
                (Value::Cat(c), AttrKind::Numeric) => c.to_string(),
            });
        }
        record.push(row.target.to_string());
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}
