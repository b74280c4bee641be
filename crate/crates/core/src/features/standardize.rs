use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-column population mean and standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub names: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl StandardizationStats {
    pub fn fit(names: &[String], matrix: &Array2<f64>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::EmptyInput("cannot standardize an empty matrix".into()));
        }
        if names.len() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows() as f64;
        let mut means = Vec::with_capacity(matrix.ncols());
        let mut stds = Vec::with_capacity(matrix.ncols());
        for column in matrix.axis_iter(Axis(1)) {
            let mean = column.sum() / n;
            let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            means.push(mean);
            stds.push(var.sqrt());
        }
        Ok(StandardizationStats {
            names: names.to_vec(),
            means,
            stds,
        })
    }

    /// z-score of one value of column `index`; constant columns map to 0.
    pub fn z(&self, index: usize, value: f64) -> f64 {
        let std = self.stds[index];
        if std > 0.0 {
            (value - self.means[index]) / std
        } else {
            0.0
        }
    }

    pub fn apply(&self, matrix: &Array2<f64>) -> Result<Array2<f64>> {
        if matrix.ncols() != self.means.len() {
            return Err(Error::DimensionMismatch(format!(
                "stats fitted on {} columns, matrix has {}",
                self.means.len(),
                matrix.ncols()
            )));
        }
        let mut out = matrix.clone();
        for (j, mut column) in out.axis_iter_mut(Axis(1)).enumerate() {
            column.mapv_inplace(|v| self.z(j, v));
        }
        Ok(out)
    }

    /// Stats restricted to the named columns, in the given order.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let mut out = StandardizationStats {
            names: Vec::new(),
            means: Vec::new(),
            stds: Vec::new(),
        };
        for name in names {
            let name = name.as_ref();
            let i = self
                .names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::MissingFeature(name.to_string()))?;
            out.names.push(name.to_string());
            out.means.push(self.means[i]);
            out.stds.push(self.stds[i]);
        }
        Ok(out)
    }
}

/// Standardizes columns with `stats`, or with stats fitted on `matrix` when
/// none are given. Returns the z-matrix and the stats used.
pub fn standardize(
    names: &[String],
    matrix: &Array2<f64>,
    stats: Option<&StandardizationStats>,
) -> Result<(Array2<f64>, StandardizationStats)> {
    if matrix.nrows() == 0 {
        return Err(Error::EmptyInput("cannot standardize an empty matrix".into()));
    }
    let stats = match stats {
        Some(s) => s.clone(),
        None => StandardizationStats::fit(names, matrix)?,
    };
    Ok((stats.apply(matrix)?, stats))
}
