//! Tabular dataset model shared by every other module.

mod csv_io;
mod encode;
mod profile;
mod rng;
mod split;

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, read_csv, write_csv, write_csv_to, KindHint};
pub use encode::encode_nominals;
pub use profile::{profile, DatasetProfile};
pub use rng::{stream_id, RngStream};
pub(crate) use split::kfold_indices;
pub use split::{kfold_split, Split};

/// Kind of an attribute column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttrKind {
    Numeric,
    /// Unordered categories, listed in first-appearance order.
    Nominal {
        categories: Vec<String>,
    },
    /// Ordered categories, listed in their declared order.
    Ordinal {
        levels: Vec<String>,
    },
}

impl AttrKind {
    pub fn is_numeric(&self) -> bool {
        matches!(self, AttrKind::Numeric)
    }

    pub fn categories(&self) -> Option<&[String]> {
        match self {
            AttrKind::Numeric => None,
            AttrKind::Nominal { categories } => Some(categories),
            AttrKind::Ordinal { levels } => Some(levels),
        }
    }
}

/// Code → category map kept on a numeric column produced by
/// [`encode_nominals`]. Code `first_code + i` stands for `categories[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub categories: Vec<String>,
    pub first_code: i64,
    pub ordinal: bool,
}

impl Codebook {
    pub fn decode(&self, code: f64) -> Option<&str> {
        let idx = code - self.first_code as f64;
        if idx.fract() != 0.0 || idx < 0.0 {
            return None;
        }
        self.categories.get(idx as usize).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    #[serde(flatten)]
    pub kind: AttrKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codebook: Option<Codebook>,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttrKind::Numeric,
            codebook: None,
        }
    }

    pub fn nominal(name: impl Into<String>, categories: Vec<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttrKind::Nominal { categories },
            codebook: None,
        }
    }

    pub fn ordinal(name: impl Into<String>, levels: Vec<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttrKind::Ordinal { levels },
            codebook: None,
        }
    }

    /// True for nominal/ordinal columns and for numeric columns that were
    /// produced by encoding one.
    pub fn is_categorical_origin(&self) -> bool {
        !self.kind.is_numeric() || self.codebook.is_some()
    }
}

/// Ordered attribute list plus the name of the (numeric) target column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    attributes: Vec<Attribute>,
    target: String,
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>, target: impl Into<String>) -> Result<Self> {
        let target = target.into();
        let mut seen = HashSet::new();
        for attr in &attributes {
            if attr.name == target {
                return Err(Error::Schema(format!(
                    "attribute `{}` duplicates the target column",
                    attr.name
                )));
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(Error::Schema(format!("duplicate attribute `{}`", attr.name)));
            }
            if let Some(cats) = attr.kind.categories() {
                if cats.is_empty() {
                    return Err(Error::Schema(format!(
                        "categorical attribute `{}` lists no categories",
                        attr.name
                    )));
                }
                let distinct: HashSet<&String> = cats.iter().collect();
                if distinct.len() != cats.len() {
                    return Err(Error::Schema(format!(
                        "categorical attribute `{}` repeats a category",
                        attr.name
                    )));
                }
            }
        }
        Ok(Schema { attributes, target })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }
}

/// A single attribute cell. Categorical cells hold an index into the
/// attribute's category list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Num(f64),
    Cat(u32),
}

impl Value {
    pub fn as_num(self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(v),
            Value::Cat(_) => None,
        }
    }

    pub fn as_cat(self) -> Option<u32> {
        match self {
            Value::Cat(c) => Some(c),
            Value::Num(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub values: Vec<Value>,
    pub target: f64,
}

impl Row {
    pub fn new(values: Vec<Value>, target: f64) -> Self {
        Row { values, target }
    }
}

/// Immutable table of rows conforming to a shared [`Schema`].
///
/// Datasets read from disk always hold at least one row; empty datasets
/// only arise as the result of filtering (e.g. a rare/normal split with no
/// rare cases).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Arc<Schema>,
    rows: Vec<Row>,
}

impl Dataset {
    pub fn new(schema: Schema, rows: Vec<Row>) -> Result<Self> {
        Self::with_schema(Arc::new(schema), rows)
    }

    pub fn with_schema(schema: Arc<Schema>, rows: Vec<Row>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            check_row(&schema, row, i)?;
        }
        Ok(Dataset { schema, rows })
    }

    /// Builds a dataset from rows already known to conform to `schema`
    /// (rows drawn from, or generated inside the category sets of, another
    /// dataset with the same schema).
    pub(crate) fn from_trusted(schema: Arc<Schema>, rows: Vec<Row>) -> Self {
        debug_assert!(rows.iter().enumerate().all(|(i, r)| check_row(&schema, r, i).is_ok()));
        Dataset { schema, rows }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn shared_schema(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Row {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.target).collect()
    }

    /// Rows at `indices`, in the given order (duplicates allowed).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: Arc::clone(&self.schema),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn into_rows(self) -> Vec<Row> {
        self.rows
    }
}

fn check_row(schema: &Schema, row: &Row, idx: usize) -> Result<()> {
    if row.values.len() != schema.len() {
        return Err(Error::RaggedRow {
            row: idx,
            expected: schema.len(),
            found: row.values.len(),
        });
    }
    if !row.target.is_finite() {
        return Err(Error::UnparseableTarget {
            row: idx,
            value: row.target.to_string(),
        });
    }
    for (attr, value) in schema.attributes().iter().zip(&row.values) {
        let ok = match (&attr.kind, value) {
            (AttrKind::Numeric, Value::Num(v)) => v.is_finite(),
            (AttrKind::Nominal { categories }, Value::Cat(c)) => (*c as usize) < categories.len(),
            (AttrKind::Ordinal { levels }, Value::Cat(c)) => (*c as usize) < levels.len(),
            _ => false,
        };
        if !ok {
            return Err(Error::InvalidCell {
                row: idx,
                column: attr.name.clone(),
                value: format!("{value:?}"),
            });
        }
    }
    Ok(())
}
