//! The retrospective-approximation outer loop.
//!
//! Each outer iteration `k` draws a fresh sample set of size `M_k`, fixes the
//! tolerance `ε_k` from information available before the solve, warm-starts
//! the inner solver at `X̄_{k−1}`, and folds the result into the weighted
//! average `X̄_k`.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{check_dim, contract, Result};
use crate::inner_solver::{solve_to_tolerance, InnerConfig, InnerStatus, SamplePathObjective, SolverState};
use crate::linalg::norm;
use crate::oracle::{derive_seed, SampleId, SamplingMode, StochasticOracle};
use crate::sample_path::{average_over, draw_sample_set, extend_sample_set, SampleSet, SampleStream, WorkLedger};
use crate::schedule::{next_tolerance, SampleSizeSchedule, SigmaCache, ToleranceInputs, ToleranceSchedule};

const TAG_EVAL: u64 = 3;
const TAG_SIGMA: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightRule {
    /// `X̄_k = X_k`.
    #[default]
    LastIterate,
    Uniform,
    /// `W_k = values[k−1]`.
    Custom { values: Vec<f64> },
}

impl WeightRule {
    fn weight(&self, k: usize) -> Result<f64> {
        match self {
            Self::LastIterate | Self::Uniform => Ok(1.0),
            Self::Custom { values } => {
                let w = *values
                    .get(k - 1)
                    .ok_or_else(|| contract(format!("custom weights have no entry for k = {k}")))?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(contract(format!("weight W_{k} = {w} must be positive")));
                }
                Ok(w)
            }
        }
    }
}

/// `Σ W_j X_j / Σ W_j`.
pub fn weighted_average(points: &[Vec<f64>], weights: &[f64]) -> Result<Vec<f64>> {
    if points.is_empty() || points.len() != weights.len() {
        return Err(contract(format!("{} points but {} weights", points.len(), weights.len())));
    }
    let d = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(crate::Error::DimensionMismatch { expected: d, got: p.len() });
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(contract(format!("weights must be positive, got {w}")));
    }
    let total: f64 = weights.iter().sum();
    let mut out = vec![0.0; d];
    for (p, w) in points.iter().zip(weights) {
        for (o, v) in out.iter_mut().zip(p) {
            *o += w * v;
        }
    }
    for o in out.iter_mut() {
        *o /= total;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Converged,
    IterationCap,
    LineSearchFailure,
    /// A baseline evaluation point.
    Step,
    /// A baseline run stopped by the divergence guard.
    Diverged,
}

impl From<InnerStatus> for RecordStatus {
    fn from(s: InnerStatus) -> Self {
        match s {
            InnerStatus::Converged => Self::Converged,
            InnerStatus::IterationCap => Self::IterationCap,
            InnerStatus::LineSearchFailure => Self::LineSearchFailure,
        }
    }
}

/// One row of a run trace.
///
/// For RA each record is one outer iteration and `m_k` is the sample-path
/// size; `inner_gradient_evals` and `inner_function_evals` count sample-path
/// evaluations, each costing `m_k` per-sample evaluations. For the baselines
/// each record is an evaluation point, `m_k` is the batch size and
/// `inner_gradient_evals` the number of steps since the previous record.
/// Line-search function evaluations count toward `cumulative_oracle_work`
/// but not `cumulative_gradient_evals`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterIterationRecord {
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

impl OuterIterationRecord {
    /// Per-sample evaluations this record accounts for.
    pub fn oracle_work_delta(&self) -> u64 {
        self.m_k * (self.inner_gradient_evals + self.inner_function_evals) + self.sigma_evals
    }

    pub fn gradient_evals_delta(&self) -> u64 {
        self.m_k * self.inner_gradient_evals + self.sigma_evals
    }
}

/// Rebuilds the cumulative oracle-work column from the per-record counts.
pub fn replay_oracle_work(records: &[OuterIterationRecord]) -> Vec<u64> {
    records
        .iter()
        .scan(0u64, |acc, r| {
            *acc += r.oracle_work_delta();
            Some(*acc)
        })
        .collect()
}

pub fn replay_gradient_evals(records: &[OuterIterationRecord]) -> Vec<u64> {
    records
        .iter()
        .scan(0u64, |acc, r| {
            *acc += r.gradient_evals_delta();
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ra,
    Sgd,
    Adam,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ra => "ra",
            Self::Sgd => "sgd",
            Self::Adam => "adam",
        }
    }
}

/// Order in which the outer loop touched its inputs, for adaptedness checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriverEvent {
    SampleDrawn { k: usize },
    ToleranceSet { k: usize },
    InnerSolveStarted { k: usize },
    InnerSolveFinished { k: usize },
    Averaged { k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub config_fingerprint: String,
    pub records: Vec<OuterIterationRecord>,
    pub final_x: Vec<f64>,
    /// `X_k` for RA, the iterate at each evaluation point for baselines.
    pub iterates: Vec<Vec<f64>>,
    /// Inner-solver starting points (RA only).
    pub warm_starts: Vec<Vec<f64>>,
    pub events: Vec<DriverEvent>,
}

/// Hex SHA-256 of the JSON encoding of `value`.
pub fn fingerprint<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("config serializes to JSON");
    hex::encode(Sha256::digest(&json))
}

/// Instrumentation settings shared by RA and the baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// Held-out samples for streaming oracles; finite datasets use every row.
    pub m_eval: usize,
    /// Record measured wall time; off by default so traces are reproducible byte for byte.
    pub record_wall_time: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { m_eval: 10_000, record_wall_time: false }
    }
}

/// Seed of the evaluation-only sample stream for a run seeded with `seed`.
pub fn eval_seed_for(seed: u64) -> u64 {
    derive_seed(seed, TAG_EVAL)
}

/// Full-data (finite mode) or held-out (streaming mode) estimate of `f(x)`
/// and `‖∇f(x)‖`. Never charged as optimization work.
pub fn measure_true_gradient(
    oracle: &dyn StochasticOracle,
    x: &[f64],
    m_eval: usize,
    eval_seed: u64,
) -> Result<(f64, f64)> {
    check_dim(oracle.dimension(), x.len())?;
    if m_eval == 0 {
        return Err(contract("m_eval must be positive"));
    }
    let ids: Vec<SampleId> = match oracle.mode() {
        SamplingMode::Finite { size } => (0..size).map(|i| SampleId::new(eval_seed, i)).collect(),
        SamplingMode::Stream => (0..m_eval as u64).map(|i| SampleId::new(eval_seed, i)).collect(),
    };
    let (loss, grad) = average_over(oracle, &ids, x, true);
    Ok((loss, norm(&grad.expect("gradient requested"))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaConfig {
    pub schedule: SampleSizeSchedule,
    pub tolerance: ToleranceSchedule,
    #[serde(default)]
    pub weights: WeightRule,
    #[serde(default)]
    pub solver: InnerConfig,
    pub outer_iterations: usize,
    /// Start each inner solve at `X̄_{k−1}` (otherwise at `x0`).
    #[serde(default = "yes")]
    pub warm_start: bool,
    /// Keep L-BFGS pairs across outer iterations.
    #[serde(default = "yes")]
    pub carry_memory: bool,
    /// Grow the previous sample set instead of drawing a fresh one.
    #[serde(default)]
    pub nested_samples: bool,
}

fn yes() -> bool {
    true
}

impl RaConfig {
    pub fn new(schedule: SampleSizeSchedule, tolerance: ToleranceSchedule, outer_iterations: usize) -> Self {
        Self {
            schedule,
            tolerance,
            weights: WeightRule::LastIterate,
            solver: InnerConfig::default(),
            outer_iterations,
            warm_start: true,
            carry_memory: true,
            nested_samples: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.tolerance.validate()?;
        self.solver.line_search.validate()?;
        if self.outer_iterations == 0 {
            return Err(contract("outer_iterations must be positive"));
        }
        if let WeightRule::Custom { values } = &self.weights {
            if values.len() < self.outer_iterations {
                return Err(contract("custom weights must cover every outer iteration"));
            }
        }
        Ok(())
    }
}

/// The sample sets a run with this seed draws, regenerated without solving.
/// Sample draws never depend on iterates, so this replays a trace exactly.
pub fn sample_sets_for(
    oracle: &dyn StochasticOracle,
    schedule: &SampleSizeSchedule,
    nested: bool,
    seed: u64,
    outer_iterations: usize,
) -> Result<Vec<SampleSet>> {
    let mut stream = SampleStream::new(seed);
    let mut sets: Vec<SampleSet> = Vec::with_capacity(outer_iterations);
    for (i, m) in schedule.sizes(outer_iterations)?.into_iter().enumerate() {
        let m = usize::try_from(m).map_err(|_| contract("sample size exceeds usize"))?;
        let set = match (nested, sets.last()) {
            (true, Some(prev)) => extend_sample_set(oracle, prev, m, i + 1, &mut stream)?,
            _ => draw_sample_set(oracle, m, i + 1, &mut stream)?,
        };
        sets.push(set);
    }
    Ok(sets)
}

/// Runs `outer_iterations` of retrospective approximation from `x0`.
pub fn run_ra(
    oracle: &dyn StochasticOracle,
    x0: &[f64],
    cfg: &RaConfig,
    eval: &EvalConfig,
    seed: u64,
) -> Result<RunTrace> {
    cfg.validate()?;
    check_dim(oracle.dimension(), x0.len())?;
    let eval_seed = eval_seed_for(seed);

    let mut stream = SampleStream::new(seed);
    let mut state = SolverState::new(x0.to_vec(), cfg.solver.memory);
    let mut ledger = WorkLedger::default();
    let mut cache = SigmaCache::default();
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut x_bar = x0.to_vec();
    let mut prev: Option<(u64, SampleSet)> = None;

    let mut records = Vec::with_capacity(cfg.outer_iterations);
    let mut warm_starts = Vec::with_capacity(cfg.outer_iterations);
    let mut events = Vec::new();

    for k in 1..=cfg.outer_iterations {
        let started = Instant::now();
        let work_before = ledger;

        let m_k = cfg.schedule.next_sample_size(k, prev.as_ref().map(|p| p.0))?;
        let m_usize = usize::try_from(m_k).map_err(|_| contract("sample size exceeds usize"))?;
        let set = match (cfg.nested_samples, prev.as_ref()) {
            (true, Some((_, prev_set))) => extend_sample_set(oracle, prev_set, m_usize, k, &mut stream)?,
            _ => draw_sample_set(oracle, m_usize, k, &mut stream)?,
        };
        events.push(DriverEvent::SampleDrawn { k });

        let tol = cfg.tolerance.capped_to(m_k);
        let inputs = ToleranceInputs {
            k,
            m_k,
            warm_start: &x_bar,
            sample_set: &set,
            oracle,
            subset_seed: derive_seed(derive_seed(seed, TAG_SIGMA), k as u64),
        };
        let decision = next_tolerance(&tol, &mut cache, &inputs, &mut ledger)?;
        events.push(DriverEvent::ToleranceSet { k });

        if !cfg.carry_memory {
            state.memory.clear();
        }
        state.x_current = if cfg.warm_start { x_bar.clone() } else { x0.to_vec() };
        warm_starts.push(state.x_current.clone());
        events.push(DriverEvent::InnerSolveStarted { k });
        let result = {
            let mut objective = SamplePathObjective::new(oracle, &set, &mut ledger);
            solve_to_tolerance(&mut objective, &mut state, decision.eps, &cfg.solver)?
        };
        events.push(DriverEvent::InnerSolveFinished { k });
        if result.status != InnerStatus::Converged {
            log::debug!("outer iteration {k}: inner solve ended with {:?}", result.status);
        }

        points.push(result.x_out.clone());
        weights.push(cfg.weights.weight(k)?);
        x_bar = match cfg.weights {
            WeightRule::LastIterate => result.x_out.clone(),
            _ => weighted_average(&points, &weights)?,
        };
        events.push(DriverEvent::Averaged { k });

        let (loss_true, grad_norm_true) = measure_true_gradient(oracle, &result.x_out, eval.m_eval, eval_seed)?;
        debug_assert_eq!(
            ledger.oracle_work - work_before.oracle_work,
            m_k * (result.gradient_evaluations + result.function_evaluations) as u64 + decision.sigma_evals
        );
        records.push(OuterIterationRecord {
            k: k as u64,
            m_k,
            eps_k: Some(decision.eps),
            sigma_hat: decision.sigma_hat,
            inner_iterations: result.inner_iterations as u64,
            inner_gradient_evals: result.gradient_evaluations as u64,
            inner_function_evals: result.function_evaluations as u64,
            sigma_evals: decision.sigma_evals,
            grad_norm_sample_path: result.grad_norm_out,
            grad_norm_true: Some(grad_norm_true),
            loss_true: Some(loss_true),
            cumulative_oracle_work: ledger.oracle_work,
            cumulative_gradient_evals: ledger.gradient_evals,
            wall_time_ms: if eval.record_wall_time { started.elapsed().as_secs_f64() * 1e3 } else { 0.0 },
            status: result.status.into(),
        });
        prev = Some((m_k, set));
    }

    Ok(RunTrace {
        algorithm: Algorithm::Ra,
        seed,
        config_fingerprint: fingerprint(cfg),
        records,
        final_x: x_bar,
        iterates: points,
        warm_starts,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{make_least_squares, Quadratic};

    #[test]
    fn average_examples() {
        assert_eq!(weighted_average(&[vec![0.0], vec![2.0]], &[1.0, 1.0]).unwrap(), vec![1.0]);
        let avg = weighted_average(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]], &[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(avg, vec![0.25, 0.5]);
        assert!(weighted_average(&[vec![1.0]], &[1.0, 2.0]).is_err());
        assert!(weighted_average(&[vec![1.0]], &[0.0]).is_err());
        assert!(weighted_average(&[vec![1.0], vec![1.0, 2.0]], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn last_iterate_rule_returns_last_point() {
        let ls = make_least_squares(3, 200, 1);
        let cfg = RaConfig::new(
            SampleSizeSchedule::Geometric { c1: 2.0, m1: 8 },
            ToleranceSchedule::Deterministic { c2: 1.0 },
            4,
        );
        let t = run_ra(&ls, &[0.0; 3], &cfg, &EvalConfig::default(), 5).unwrap();
        assert_eq!(&t.final_x, t.iterates.last().unwrap());
        for k in 1..4 {
            assert_eq!(t.warm_starts[k], t.iterates[k - 1]);
        }
    }

    #[test]
    fn noiseless_problem_needs_few_steps_after_first() {
        let q = Quadratic::new(vec![2.0, 0.5, 0.5, 1.0], vec![1.0, -1.0], 0.0, 3).unwrap();
        let cfg = RaConfig::new(
            SampleSizeSchedule::Geometric { c1: 2.0, m1: 4 },
            ToleranceSchedule::Deterministic { c2: 1e-3 },
            6,
        );
        let t = run_ra(&q, &[5.0, 5.0], &cfg, &EvalConfig { m_eval: 10, ..Default::default() }, 9).unwrap();
        let first = &t.records[0];
        assert_eq!(first.status, RecordStatus::Converged);
        assert!(first.grad_norm_true.unwrap() <= first.eps_k.unwrap());
        for r in &t.records[1..] {
            assert!(r.inner_iterations <= 3, "k = {}: {} steps", r.k, r.inner_iterations);
        }
    }

    #[test]
    fn streaming_measurement_spread() {
        let nc = crate::oracle::make_nonconvex_test(2, 4);
        let x = [0.3, 0.3];
        let m = 20_000;
        let (a, _) = measure_true_gradient(&nc, &x, m, 1).unwrap();
        let (b, _) = measure_true_gradient(&nc, &x, m, 2).unwrap();
        // Per-sample loss variance is at most a few units for s = 1, d = 2.
        assert!((a - b).abs() < 3.0 * (2.0 * 4.0 / m as f64).sqrt(), "{a} vs {b}");
        assert_ne!(a, b);
        assert_eq!(nc.work().samples(), 0);
    }
}
