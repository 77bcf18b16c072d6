use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::MfccConfig;
use crate::{Error, Label, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FeatureVector<T> {
    pub source_id: String,
    pub label: Label,
    pub values: Vec<T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(values: Vec<T>, label: Label, source_id: String) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("{source_id}: feature {i} is not finite")));
        }
        Ok(Self { source_id, label, values })
    }
}

/// Labeled feature rows sharing one dimensionality. Serialises as
/// `{"config": ..., "rows": [{"source_id", "label", "values"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FeatureSet<T> {
    config: Option<MfccConfig>,
    rows: Vec<FeatureVector<T>>,
}

impl<T: Scalar> FeatureSet<T> {
    pub fn new(rows: Vec<FeatureVector<T>>, config: Option<MfccConfig>) -> Result<Self> {
        let set = Self { config, rows };
        set.check()?;
        Ok(set)
    }

    fn check(&self) -> Result<()> {
        let dim = self.dim();
        let mut ids = HashSet::new();
        for r in &self.rows {
            if r.values.len() != dim {
                return Err(Error::Validation(format!(
                    "{}: {} features, expected {dim}",
                    r.source_id,
                    r.values.len()
                )));
            }
            if r.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("{}: non-finite feature", r.source_id)));
            }
            if !ids.insert(r.source_id.as_str()) {
                return Err(Error::Validation(format!("duplicate source id {:?}", r.source_id)));
            }
        }
        Ok(())
    }

    /// Builds a set from a dense matrix; source ids are `row-<index>`.
    pub fn from_matrix(x: &[Vec<T>], y: &[Label]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Validation("feature and label counts differ".into()));
        }
        let rows = x
            .iter()
            .zip(y)
            .enumerate()
            .map(|(i, (v, &l))| FeatureVector::new(v.clone(), l, format!("row-{i:04}")))
            .collect::<Result<_>>()?;
        Self::new(rows, None)
    }

    pub fn rows(&self) -> &[FeatureVector<T>] {
        &self.rows
    }

    pub fn config(&self) -> Option<&MfccConfig> {
        self.config.as_ref()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.values.len())
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn matrix(&self) -> Vec<Vec<T>> {
        self.rows.iter().map(|r| r.values.clone()).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.rows.iter().filter(|r| r.label == label).count()
    }

    /// Keeps only the given feature columns, in the given order.
    pub fn select(&self, columns: &[usize]) -> Result<Self> {
        let dim = self.dim();
        if let Some(&c) = columns.iter().find(|&&c| c >= dim) {
            return Err(Error::Validation(format!("feature index {c} out of range for {dim} features")));
        }
        Ok(Self {
            config: self.config,
            rows: self
                .rows
                .iter()
                .map(|r| FeatureVector {
                    source_id: r.source_id.clone(),
                    label: r.label,
                    values: columns.iter().map(|&c| r.values[c]).collect(),
                })
                .collect(),
        })
    }

    /// Same rows in a different order.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self {
            config: self.config,
            rows: order.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let set: Self = serde_json::from_reader(r)?;
        set.check()?;
        Ok(set)
    }

    /// CSV with columns `source_id,label,c0,c1,...` (`c1,...` when c0 is excluded).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let first = self.config.map_or(0, |c| usize::from(!c.include_c0));
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["source_id".to_string(), "label".to_string()];
        header.extend((0..self.dim()).map(|i| format!("c{}", i + first)));
        wtr.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.source_id.clone(), r.label.to_string()];
            rec.extend(r.values.iter().map(|v| format!("{v:?}")));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io("<features csv>", e))?;
        Ok(())
    }
}
