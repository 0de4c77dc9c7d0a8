//! Training data handling: rows of (input vector, target), plus the min-max
//! transform that maps every column into [0, 1] and back.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AnfisError;

/// Closed interval of one raw column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    /// Maps `min..max` onto `0..1`.
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    /// Inverse of [`Range::normalize`].
    pub fn denormalize(&self, u: f64) -> f64 {
        self.min + u * (self.max - self.min)
    }

    fn is_degenerate(&self) -> bool {
        let width = self.max - self.min;
        !(width > 0.0) || !width.is_finite()
    }
}

/// Per-column min-max transforms for the inputs and the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub inputs: Vec<Range>,
    pub target: Range,
}

impl Normalization {
    /// The do-nothing transform (`0..1` per column), for data already in
    /// model space.
    pub fn identity(n_inputs: usize) -> Self {
        Self {
            inputs: vec![Range::new(0.0, 1.0); n_inputs],
            target: Range::new(0.0, 1.0),
        }
    }

    /// Fits min-max ranges over the rows. Every column must have nonzero
    /// range, otherwise the transform would not be invertible.
    pub fn fit(rows: &[(Vec<f64>, f64)]) -> Result<Self, AnfisError> {
        let n_inputs = rows.first().ok_or(AnfisError::EmptyDataset)?.0.len();
        let mut inputs = Vec::with_capacity(n_inputs);
        for col in 0..n_inputs {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for (x, _) in rows {
                min = min.min(x[col]);
                max = max.max(x[col]);
            }
            let range = Range::new(min, max);
            if range.is_degenerate() {
                return Err(AnfisError::ZeroRange {
                    column: format!("input {col}"),
                });
            }
            inputs.push(range);
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (_, y) in rows {
            min = min.min(*y);
            max = max.max(*y);
        }
        let target = Range::new(min, max);
        if target.is_degenerate() {
            return Err(AnfisError::ZeroRange {
                column: "target".to_owned(),
            });
        }
        Ok(Self { inputs, target })
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn normalize_input(&self, raw: &[f64]) -> Result<Vec<f64>, AnfisError> {
        if raw.len() != self.inputs.len() {
            return Err(AnfisError::ArityMismatch {
                expected: self.inputs.len(),
                got: raw.len(),
            });
        }
        Ok(raw
            .iter()
            .zip(&self.inputs)
            .map(|(&x, r)| r.normalize(x))
            .collect())
    }

    pub fn normalize_row(&self, row: &(Vec<f64>, f64)) -> Result<(Vec<f64>, f64), AnfisError> {
        Ok((self.normalize_input(&row.0)?, self.target.normalize(row.1)))
    }
}

/// Raw training rows plus the normalization fitted (or assigned) to them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<(Vec<f64>, f64)>,
    normalization: Normalization,
}

impl Dataset {
    /// Fits a min-max normalization over the given rows.
    pub fn fit(rows: Vec<(Vec<f64>, f64)>) -> Result<Self, AnfisError> {
        check_arity(&rows)?;
        let normalization = Normalization::fit(&rows)?;
        Ok(Self {
            rows,
            normalization,
        })
    }

    /// Uses the identity transform; rows are taken to be in model space
    /// already. Useful for small exact-arithmetic fixtures.
    pub fn with_identity_normalization(rows: Vec<(Vec<f64>, f64)>) -> Result<Self, AnfisError> {
        check_arity(&rows)?;
        let n_inputs = rows[0].0.len();
        Ok(Self {
            rows,
            normalization: Normalization::identity(n_inputs),
        })
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_inputs(&self) -> usize {
        self.rows.first().map_or(0, |(x, _)| x.len())
    }

    /// All rows mapped through this dataset's own normalization.
    pub fn normalized_rows(&self) -> Vec<(Vec<f64>, f64)> {
        self.rows
            .iter()
            .map(|row| {
                self.normalization
                    .normalize_row(row)
                    .expect("arity checked")
            })
            .collect()
    }

    /// Serializes as the benchmark exchange format:
    /// `pixels,filter_id,psnr_db`. Only defined for two-input datasets.
    pub fn to_csv(&self) -> Result<String, AnfisError> {
        if self.n_inputs() != 2 {
            return Err(AnfisError::Csv {
                reason: format!(
                    "csv schema carries 2 inputs (pixels, filter_id); dataset has {}",
                    self.n_inputs()
                ),
            });
        }
        let mut out = String::from("pixels,filter_id,psnr_db\n");
        for (x, y) in &self.rows {
            out.push_str(&format!("{},{},{}\n", x[0], x[1], y));
        }
        Ok(out)
    }

    /// Parses the `pixels,filter_id,psnr_db` exchange format and fits a
    /// fresh normalization over the rows.
    pub fn from_csv_str(text: &str) -> Result<Self, AnfisError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| AnfisError::Csv {
                reason: e.to_string(),
            })?;
            if record.len() != 3 {
                return Err(AnfisError::Csv {
                    reason: format!("row {} has {} fields, expected 3", line + 2, record.len()),
                });
            }
            let parse = |i: usize| -> Result<f64, AnfisError> {
                record[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| AnfisError::Csv {
                        reason: format!(
                            "row {}: cannot parse {:?} as a number",
                            line + 2,
                            &record[i]
                        ),
                    })
            };
            rows.push((vec![parse(0)?, parse(1)?], parse(2)?));
        }
        Self::fit(rows)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self, AnfisError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| AnfisError::Csv {
            reason: format!("{}: {e}", path.as_ref().display()),
        })?;
        Self::from_csv_str(&text)
    }
}

fn check_arity(rows: &[(Vec<f64>, f64)]) -> Result<(), AnfisError> {
    let first = rows.first().ok_or(AnfisError::EmptyDataset)?.0.len();
    for (index, (x, y)) in rows.iter().enumerate() {
        if x.len() != first {
            return Err(AnfisError::MixedArity {
                a: first,
                b: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) || !y.is_finite() {
            return Err(AnfisError::NonFinite { row: index });
        }
    }
    Ok(())
}
