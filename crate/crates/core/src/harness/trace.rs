use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::driver::{Algorithm, OuterIterationRecord, RecordStatus, RunTrace};
use crate::error::{Error, Result};

/// One CSV row: an [`OuterIterationRecord`] plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub config_fingerprint: String,
    pub k: u64,
    pub m_k: u64,
    pub eps_k: Option<f64>,
    pub sigma_hat: Option<f64>,
    pub inner_iterations: u64,
    pub inner_gradient_evals: u64,
    pub inner_function_evals: u64,
    pub sigma_evals: u64,
    pub grad_norm_sample_path: f64,
    pub grad_norm_true: Option<f64>,
    pub loss_true: Option<f64>,
    pub cumulative_oracle_work: u64,
    pub cumulative_gradient_evals: u64,
    pub wall_time_ms: f64,
    pub status: RecordStatus,
}

impl TraceRow {
    fn new(t: &RunTrace, r: &OuterIterationRecord) -> Self {
        Self {
            algorithm: t.algorithm,
            seed: t.seed,
            config_fingerprint: t.config_fingerprint.clone(),
            k: r.k,
            m_k: r.m_k,
            eps_k: r.eps_k,
            sigma_hat: r.sigma_hat,
            inner_iterations: r.inner_iterations,
            inner_gradient_evals: r.inner_gradient_evals,
            inner_function_evals: r.inner_function_evals,
            sigma_evals: r.sigma_evals,
            grad_norm_sample_path: r.grad_norm_sample_path,
            grad_norm_true: r.grad_norm_true,
            loss_true: r.loss_true,
            cumulative_oracle_work: r.cumulative_oracle_work,
            cumulative_gradient_evals: r.cumulative_gradient_evals,
            wall_time_ms: r.wall_time_ms,
            status: r.status,
        }
    }

    pub fn record(&self) -> OuterIterationRecord {
        OuterIterationRecord {
            k: self.k,
            m_k: self.m_k,
            eps_k: self.eps_k,
            sigma_hat: self.sigma_hat,
            inner_iterations: self.inner_iterations,
            inner_gradient_evals: self.inner_gradient_evals,
            inner_function_evals: self.inner_function_evals,
            sigma_evals: self.sigma_evals,
            grad_norm_sample_path: self.grad_norm_sample_path,
            grad_norm_true: self.grad_norm_true,
            loss_true: self.loss_true,
            cumulative_oracle_work: self.cumulative_oracle_work,
            cumulative_gradient_evals: self.cumulative_gradient_evals,
            wall_time_ms: self.wall_time_ms,
            status: self.status,
        }
    }
}

/// A trace as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTrace {
    pub path: PathBuf,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub config_fingerprint: String,
    pub records: Vec<OuterIterationRecord>,
}

pub fn trace_file_name(replication: usize) -> String {
    format!("trace_r{replication}.csv")
}

pub fn write_trace_csv(path: &Path, trace: &RunTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    for r in &trace.records {
        w.serialize(TraceRow::new(trace, r))?;
    }
    if trace.records.is_empty() {
        // Still emit the header so the schema is visible.
        w.write_record(TRACE_COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}

pub const TRACE_COLUMNS: [&str; 18] = [
    "algorithm",
    "seed",
    "config_fingerprint",
    "k",
    "m_k",
    "eps_k",
    "sigma_hat",
    "inner_iterations",
    "inner_gradient_evals",
    "inner_function_evals",
    "sigma_evals",
    "grad_norm_sample_path",
    "grad_norm_true",
    "loss_true",
    "cumulative_oracle_work",
    "cumulative_gradient_evals",
    "wall_time_ms",
    "status",
];

pub fn read_trace_csv(path: &Path) -> Result<LoadedTrace> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != TRACE_COLUMNS {
        return Err(Error::Data { path: path.to_path_buf(), message: format!("unexpected columns {header:?}") });
    }
    let rows: Vec<TraceRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
    let first = rows
        .first()
        .ok_or_else(|| Error::Data { path: path.to_path_buf(), message: "trace has no records".into() })?;
    if rows.iter().any(|r| r.seed != first.seed || r.algorithm != first.algorithm) {
        return Err(Error::Data { path: path.to_path_buf(), message: "mixed runs in one trace".into() });
    }
    Ok(LoadedTrace {
        path: path.to_path_buf(),
        algorithm: first.algorithm,
        seed: first.seed,
        config_fingerprint: first.config_fingerprint.clone(),
        records: rows.iter().map(TraceRow::record).collect(),
    })
}

/// Reads every `trace_r*.csv` in `dir`, ordered by replication index.
pub fn read_trace_dir(dir: &Path) -> Result<Vec<LoadedTrace>> {
    let mut found: Vec<(usize, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if let Some(r) = name.strip_prefix("trace_r").and_then(|s| s.strip_suffix(".csv")) {
            if let Ok(r) = r.parse() {
                found.push((r, path));
            }
        }
    }
    found.sort();
    found.iter().map(|(_, p)| read_trace_csv(p)).collect()
}
