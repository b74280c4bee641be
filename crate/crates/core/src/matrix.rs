use std::io::Write;

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Level;

/// Documents × features matrix with row labels and column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub doc_ids: Vec<String>,
    pub labels: Vec<Level>,
    pub names: Vec<String>,
    pub values: Array2<f64>,
}

impl FeatureMatrix {
    pub fn new(
        doc_ids: Vec<String>,
        labels: Vec<Level>,
        names: Vec<String>,
        values: Array2<f64>,
    ) -> Result<Self> {
        let (rows, cols) = values.dim();
        if doc_ids.len() != rows || labels.len() != rows {
            return Err(Error::DimensionMismatch(format!(
                "{rows} rows but {} ids and {} labels",
                doc_ids.len(),
                labels.len()
            )));
        }
        if names.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "{cols} columns but {} names",
                names.len()
            )));
        }
        Ok(FeatureMatrix {
            doc_ids,
            labels,
            names,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::MissingFeature(name.to_string()))
    }

    pub fn column(&self, index: usize) -> ArrayView1<'_, f64> {
        self.values.column(index)
    }

    pub fn label_ordinals(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.ordinal()).collect()
    }

    /// Keeps only the named columns, in the order given.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<FeatureMatrix> {
        let indices = names
            .iter()
            .map(|n| self.column_index(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureMatrix {
            doc_ids: self.doc_ids.clone(),
            labels: self.labels.clone(),
            names: names.iter().map(|n| n.as_ref().to_string()).collect(),
            values: self.values.select(Axis(1), &indices),
        })
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            doc_ids: indices.iter().map(|&i| self.doc_ids[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            names: self.names.clone(),
            values: self.values.select(Axis(0), indices),
        }
    }

    /// Same rows and names with replaced values (e.g. after standardization).
    pub fn with_values(&self, values: Array2<f64>) -> Result<FeatureMatrix> {
        FeatureMatrix::new(
            self.doc_ids.clone(),
            self.labels.clone(),
            self.names.clone(),
            values,
        )
    }

    /// Writes `doc_id,label,<feature columns...>`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["doc_id".to_string(), "label".to_string()];
        header.extend(self.names.iter().cloned());
        out.write_record(&header)?;
        for (row, (id, label)) in self.values.rows().into_iter().zip(self.doc_ids.iter().zip(&self.labels)) {
            let mut record = vec![id.clone(), label.number().to_string()];
            record.extend(row.iter().map(|v| format_float(*v)));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Shortest round-trip representation, stable across runs.
pub(crate) fn format_float(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}
