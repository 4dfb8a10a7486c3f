//! Experiment orchestration: configs, replicated runs, trace files,
//! cross-replication aggregation, and self-checks.

mod aggregate;
mod check;
mod config;
mod trace;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

pub use aggregate::{
    aggregate, quantile_sorted, quantiles, AggregateFile, AggregatePoint, AggregateSeries, Quantiles, XAxis,
};
pub use check::{replay_certificates, self_check, CheckItem, CheckReport, GRADIENT_CHECK_PAIRS, GRADIENT_CHECK_TOLERANCE};
pub use config::{AlgorithmChoice, CsvModel, ExperimentConfig, ProblemConfig, RaSection, TestFault};
pub use trace::{read_trace_csv, read_trace_dir, trace_file_name, write_trace_csv, LoadedTrace, TraceRow, TRACE_COLUMNS};

use crate::baselines::run_baseline;
use crate::driver::{run_ra, Algorithm, OuterIterationRecord, RunTrace};
use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "RETRO_OPT_THREADS";
pub const AGGREGATE_FILE: &str = "aggregate.json";
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.json";

/// Runs `f` on a pool capped at `RETRO_OPT_THREADS` workers, if set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Error::Config {
                key: THREADS_ENV.into(),
                message: format!("expected a positive integer, got {v:?}"),
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::error::contract(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub output_dir: PathBuf,
    /// Completed replications, by replication index.
    pub traces: Vec<(usize, RunTrace)>,
    pub aggregate: AggregateFile,
}

#[derive(Serialize)]
struct ResolvedConfig<'a> {
    fingerprint: String,
    config: &'a ExperimentConfig,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Runs one replication with the given seed.
pub fn run_replication(cfg: &ExperimentConfig, oracle: &dyn crate::oracle::StochasticOracle, x0: &[f64], seed: u64) -> Result<RunTrace> {
    let mut trace = match (&cfg.algorithm, &cfg.baseline) {
        (config::AlgorithmChoice::Ra, _) => run_ra(oracle, x0, &cfg.ra_config(), &cfg.eval, seed)?,
        (config::AlgorithmChoice::Baseline, Some(b)) => run_baseline(oracle, x0, b, &cfg.eval, seed)?,
        (config::AlgorithmChoice::Baseline, None) => {
            return Err(Error::Config { key: "baseline".into(), message: "missing section".into() })
        }
    };
    trace.config_fingerprint = cfg.fingerprint();
    Ok(trace)
}

fn aggregate_runs(algorithm: Algorithm, runs: &[&[OuterIterationRecord]], seeds: Vec<u64>, warnings: Vec<String>) -> AggregateFile {
    AggregateFile {
        replications: runs.len(),
        seeds,
        series: XAxis::ALL.iter().map(|axis| aggregate(algorithm, runs, *axis)).collect(),
        warnings,
    }
}

/// Runs every replication in parallel from the same initial point and
/// writes `trace_r{r}.csv`, `aggregate.json`, and `resolved_config.json`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let oracle = cfg.build_oracle()?;
    let x0 = cfg.initial_point(oracle.dimension())?;
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir)?;
    write_json(&dir.join(RESOLVED_CONFIG_FILE), &ResolvedConfig { fingerprint: cfg.fingerprint(), config: cfg })?;

    let seeds: Vec<u64> = cfg.seeds().collect();
    let results: Vec<Result<RunTrace>> = with_thread_cap(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(r, seed)| {
                let trace = run_replication(cfg, oracle.as_ref(), &x0, *seed)?;
                write_trace_csv(&dir.join(trace_file_name(r)), &trace)?;
                Ok(trace)
            })
            .collect()
    })?;

    let mut traces = Vec::new();
    let mut warnings = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(t) => traces.push((r, t)),
            Err(e) => {
                log::warn!("replication {r} failed: {e}");
                warnings.push(format!("replication {r} (seed {}) failed: {e}", seeds[r]));
            }
        }
    }
    if traces.is_empty() {
        return Err(crate::error::contract(format!("every replication failed: {}", warnings.join("; "))));
    }
    let algorithm = traces[0].1.algorithm;
    let runs: Vec<&[OuterIterationRecord]> = traces.iter().map(|(_, t)| t.records.as_slice()).collect();
    let aggregate = aggregate_runs(algorithm, &runs, traces.iter().map(|(_, t)| t.seed).collect(), warnings);
    write_json(&dir.join(AGGREGATE_FILE), &aggregate)?;
    Ok(ExperimentOutput { output_dir: dir, traces, aggregate })
}

/// Re-aggregates the trace files in `dir` and rewrites its `aggregate.json`.
pub fn aggregate_dir(dir: &Path) -> Result<AggregateFile> {
    let loaded = read_trace_dir(dir)?;
    let first = loaded.first().ok_or_else(|| Error::Data {
        path: dir.to_path_buf(),
        message: "no trace_r*.csv files".into(),
    })?;
    if loaded.iter().any(|t| t.algorithm != first.algorithm) {
        return Err(Error::Data { path: dir.to_path_buf(), message: "traces from different algorithms".into() });
    }
    let runs: Vec<&[OuterIterationRecord]> = loaded.iter().map(|t| t.records.as_slice()).collect();
    let agg = aggregate_runs(first.algorithm, &runs, loaded.iter().map(|t| t.seed).collect(), Vec::new());
    write_json(&dir.join(AGGREGATE_FILE), &agg)?;
    Ok(agg)
}

/// Copy of `cfg` with the dotted `key` set to `raw`, typed like the value it replaces.
pub fn override_key(cfg: &ExperimentConfig, key: &str, raw: &str) -> Result<ExperimentConfig> {
    let bad = |message: String| Error::Config { key: key.to_string(), message };
    let mut root = toml::Value::try_from(cfg).map_err(|e| bad(e.to_string()))?;
    let parts: Vec<&str> = key.split('.').collect();
    let (last, path) = parts.split_last().ok_or_else(|| bad("empty key".into()))?;
    let mut table = &mut root;
    for p in path {
        table = table
            .as_table_mut()
            .ok_or_else(|| bad(format!("`{p}` is not a table")))?
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = table.as_table_mut().ok_or_else(|| bad("parent is not a table".into()))?;
    let value = match table.get(*last) {
        Some(toml::Value::Float(_)) => raw.parse::<f64>().map(toml::Value::Float).map_err(|e| bad(e.to_string()))?,
        Some(toml::Value::Integer(_)) => raw.parse::<i64>().map(toml::Value::Integer).map_err(|e| bad(e.to_string()))?,
        Some(toml::Value::Boolean(_)) => raw.parse::<bool>().map(toml::Value::Boolean).map_err(|e| bad(e.to_string()))?,
        Some(toml::Value::String(_)) => toml::Value::String(raw.to_string()),
        _ => raw
            .parse::<i64>()
            .map(toml::Value::Integer)
            .or_else(|_| raw.parse::<f64>().map(toml::Value::Float))
            .or_else(|_| raw.parse::<bool>().map(toml::Value::Boolean))
            .unwrap_or_else(|_| toml::Value::String(raw.to_string())),
    };
    table.insert(last.to_string(), value);
    let text = toml::to_string(&root).map_err(|e| bad(e.to_string()))?;
    ExperimentConfig::from_toml_str(&text)
}

/// Runs one experiment per value of `key`, each in `output_dir/key=value`.
pub fn sweep(cfg: &ExperimentConfig, key: &str, values: &[String]) -> Result<Vec<ExperimentOutput>> {
    values
        .iter()
        .map(|v| {
            let mut c = override_key(cfg, key, v)?;
            c.output_dir = cfg.output_dir.join(format!("{key}={v}"));
            run_experiment(&c)
        })
        .collect()
}
