use std::path::Path;

use crate::error::{Error, Result};

/// A finite dataset read from CSV: one `y` column, every other column a feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    /// Row-major `n × p`.
    pub features: Vec<f64>,
    pub response: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.response.len()
    }

    pub fn is_empty(&self) -> bool {
        self.response.is_empty()
    }
}

pub fn load_csv_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let data_err = |message: String| Error::Data { path: path.to_path_buf(), message };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let y_col = headers
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| data_err("no column named `y`".into()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != y_col)
        .map(|(_, h)| h.to_string())
        .collect();
    if feature_names.is_empty() {
        return Err(data_err("no feature columns".into()));
    }

    let mut features = Vec::new();
    let mut response = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                data_err(format!("row {} column `{}`: cannot parse {field:?} as a float", row_idx + 2, &headers[col]))
            })?;
            if col == y_col {
                response.push(v);
            } else {
                features.push(v);
            }
        }
    }
    if response.is_empty() {
        return Err(data_err("dataset has no rows".into()));
    }
    Ok(Dataset { feature_names, features, response })
}
