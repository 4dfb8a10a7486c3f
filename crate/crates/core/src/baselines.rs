//! Fixed-step SGD and Adam, instrumented with the same trace schema as RA.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::driver::{
    eval_seed_for, fingerprint, measure_true_gradient, Algorithm, EvalConfig, OuterIterationRecord, RecordStatus,
    RunTrace,
};
use crate::error::{check_dim, contract, Result};
use crate::linalg::{all_finite, norm};
use crate::oracle::StochasticOracle;
use crate::sample_path::{draw_sample_set, eval_sample_path, SampleStream, WorkLedger};

/// Iterates with norm beyond this are treated as diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SgdConfig {
    pub step_size: f64,
    pub batch_size: usize,
    pub total_steps: u64,
    /// Steps between trace records.
    pub eval_cadence: usize,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self { step_size: 0.01, batch_size: 32, total_steps: 1000, eval_cadence: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamConfig {
    pub step_size: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_hat: f64,
    pub batch_size: usize,
    pub total_steps: u64,
    pub eval_cadence: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            step_size: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps_hat: 1e-8,
            batch_size: 32,
            total_steps: 1000,
            eval_cadence: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaselineConfig {
    Sgd(SgdConfig),
    Adam(AdamConfig),
}

impl BaselineConfig {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            Self::Sgd(_) => Algorithm::Sgd,
            Self::Adam(_) => Algorithm::Adam,
        }
    }

    pub fn batch_size(&self) -> usize {
        match self {
            Self::Sgd(c) => c.batch_size,
            Self::Adam(c) => c.batch_size,
        }
    }

    /// Sets `total_steps` to spend at most `budget` per-sample gradient evaluations.
    pub fn with_work_budget(mut self, budget: u64) -> Self {
        let steps = (budget / self.batch_size().max(1) as u64).max(1);
        match &mut self {
            Self::Sgd(c) => c.total_steps = steps,
            Self::Adam(c) => c.total_steps = steps,
        }
        self
    }
}

/// Adam moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(d: usize) -> Self {
        Self { m: vec![0.0; d], v: vec![0.0; d], t: 0 }
    }

    /// One bias-corrected Adam update of `x` with gradient `g`.
    pub fn step(&mut self, x: &mut [f64], g: &[f64], cfg: &AdamConfig) {
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        for i in 0..x.len() {
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g[i];
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            x[i] -= cfg.step_size * m_hat / (v_hat.sqrt() + cfg.eps_hat);
        }
    }
}

enum Update<'a> {
    Sgd(f64),
    Adam(AdamState, &'a AdamConfig),
}

struct Common {
    batch_size: usize,
    total_steps: u64,
    eval_cadence: usize,
}

pub fn run_sgd(
    oracle: &dyn StochasticOracle,
    x0: &[f64],
    cfg: &SgdConfig,
    eval: &EvalConfig,
    seed: u64,
) -> Result<RunTrace> {
    if !(cfg.step_size > 0.0 && cfg.step_size.is_finite()) {
        return Err(contract(format!("step_size = {} must be positive", cfg.step_size)));
    }
    let common = Common { batch_size: cfg.batch_size, total_steps: cfg.total_steps, eval_cadence: cfg.eval_cadence };
    run_minibatch(oracle, x0, common, Update::Sgd(cfg.step_size), eval, seed, Algorithm::Sgd, fingerprint(cfg))
}

pub fn run_adam(
    oracle: &dyn StochasticOracle,
    x0: &[f64],
    cfg: &AdamConfig,
    eval: &EvalConfig,
    seed: u64,
) -> Result<RunTrace> {
    if !(cfg.step_size > 0.0 && cfg.step_size.is_finite()) {
        return Err(contract(format!("step_size = {} must be positive", cfg.step_size)));
    }
    if !(0.0..1.0).contains(&cfg.beta1) || !(0.0..1.0).contains(&cfg.beta2) || !(cfg.eps_hat > 0.0) {
        return Err(contract("Adam needs beta1, beta2 in [0, 1) and eps_hat > 0"));
    }
    let common = Common { batch_size: cfg.batch_size, total_steps: cfg.total_steps, eval_cadence: cfg.eval_cadence };
    let update = Update::Adam(AdamState::new(oracle.dimension()), cfg);
    run_minibatch(oracle, x0, common, update, eval, seed, Algorithm::Adam, fingerprint(cfg))
}

pub fn run_baseline(
    oracle: &dyn StochasticOracle,
    x0: &[f64],
    cfg: &BaselineConfig,
    eval: &EvalConfig,
    seed: u64,
) -> Result<RunTrace> {
    match cfg {
        BaselineConfig::Sgd(c) => run_sgd(oracle, x0, c, eval, seed),
        BaselineConfig::Adam(c) => run_adam(oracle, x0, c, eval, seed),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_minibatch(
    oracle: &dyn StochasticOracle,
    x0: &[f64],
    common: Common,
    mut update: Update<'_>,
    eval: &EvalConfig,
    seed: u64,
    algorithm: Algorithm,
    config_fingerprint: String,
) -> Result<RunTrace> {
    check_dim(oracle.dimension(), x0.len())?;
    if common.batch_size == 0 || common.eval_cadence == 0 {
        return Err(contract("batch_size and eval_cadence must be positive"));
    }
    let batch = common.batch_size as u64;
    let total_steps = common.total_steps;
    if total_steps == 0 {
        return Err(contract("total_steps must be positive"));
    }
    let eval_seed = eval_seed_for(seed);
    let mut stream = SampleStream::new(seed);
    let mut ledger = WorkLedger::default();
    let mut x = x0.to_vec();
    let mut records = Vec::new();
    let mut iterates = Vec::new();
    let mut since_record = 0u64;
    let mut segment_start = Instant::now();

    for step in 1..=total_steps {
        let set = draw_sample_set(oracle, common.batch_size, step as usize, &mut stream)?;
        let ev = eval_sample_path(oracle, &set, &x, &mut ledger)?;
        match &mut update {
            Update::Sgd(alpha) => crate::linalg::axpy(-*alpha, &ev.gradient, &mut x),
            Update::Adam(state, cfg) => state.step(&mut x, &ev.gradient, cfg),
        }
        since_record += 1;

        let diverged = !all_finite(&x) || norm(&x) > DIVERGENCE_NORM;
        if diverged || since_record == common.eval_cadence as u64 || step == total_steps {
            let (loss_true, grad_norm_true) = if diverged {
                (None, None)
            } else {
                let (l, g) = measure_true_gradient(oracle, &x, eval.m_eval, eval_seed)?;
                (Some(l), Some(g))
            };
            records.push(OuterIterationRecord {
                k: step,
                m_k: batch,
                eps_k: None,
                sigma_hat: None,
                inner_iterations: since_record,
                inner_gradient_evals: since_record,
                inner_function_evals: 0,
                sigma_evals: 0,
                grad_norm_sample_path: ev.grad_norm,
                grad_norm_true,
                loss_true,
                cumulative_oracle_work: ledger.oracle_work,
                cumulative_gradient_evals: ledger.gradient_evals,
                wall_time_ms: if eval.record_wall_time { segment_start.elapsed().as_secs_f64() * 1e3 } else { 0.0 },
                status: if diverged { RecordStatus::Diverged } else { RecordStatus::Step },
            });
            iterates.push(x.clone());
            since_record = 0;
            segment_start = Instant::now();
            if diverged {
                log::debug!("{} diverged at step {step}", algorithm.as_str());
                break;
            }
        }
    }

    Ok(RunTrace {
        algorithm,
        seed,
        config_fingerprint,
        records,
        final_x: x,
        iterates,
        warm_starts: Vec::new(),
        events: Vec::new(),
    })
}
