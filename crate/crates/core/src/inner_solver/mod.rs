//! Deterministic inner solver for one sample-path problem.
//!
//! L-BFGS (two-loop recursion) with Armijo backtracking, run until
//! `‖∇f(x)‖ ≤ ε`. The curvature memory lives in [`SolverState`] and is
//! carried from one sample-path problem to the next.

mod line_search;
mod memory;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, contract, Result};
use crate::linalg::{all_finite, dot, norm, sub};
use crate::oracle::StochasticOracle;
use crate::sample_path::{eval_sample_path, eval_sample_path_value, SampleSet, WorkLedger};

pub use line_search::{backtracking_search, LineSearchOutcome, LineSearchParams};
pub use memory::{CurvaturePair, LbfgsMemory, CURVATURE_THRESHOLD};

/// A smooth deterministic objective as seen by the inner solver.
pub trait Objective {
    fn dimension(&self) -> usize;
    fn value(&mut self, x: &[f64]) -> Result<f64>;
    fn value_grad(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// `f_M` over a sample set, charging every evaluation to a run's ledger.
pub struct SamplePathObjective<'a> {
    oracle: &'a dyn StochasticOracle,
    set: &'a SampleSet,
    ledger: &'a mut WorkLedger,
}

impl<'a> SamplePathObjective<'a> {
    pub fn new(oracle: &'a dyn StochasticOracle, set: &'a SampleSet, ledger: &'a mut WorkLedger) -> Self {
        Self { oracle, set, ledger }
    }
}

impl Objective for SamplePathObjective<'_> {
    fn dimension(&self) -> usize {
        self.oracle.dimension()
    }

    fn value(&mut self, x: &[f64]) -> Result<f64> {
        eval_sample_path_value(self.oracle, self.set, x, self.ledger)
    }

    fn value_grad(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let e = eval_sample_path(self.oracle, self.set, x, self.ledger)?;
        Ok((e.value, e.gradient))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Lbfgs,
    /// Steepest descent with the same line search; ignores the memory.
    GradientDescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InnerConfig {
    pub kind: SolverKind,
    /// L-BFGS memory capacity.
    pub memory: usize,
    pub line_search: LineSearchParams,
    /// Accepted-step cap per solve; `None` means `200·d`.
    pub inner_cap: Option<usize>,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self { kind: SolverKind::Lbfgs, memory: 10, line_search: LineSearchParams::default(), inner_cap: None }
    }
}

impl InnerConfig {
    pub fn cap_for(&self, d: usize) -> usize {
        self.inner_cap.unwrap_or(200 * d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerStatus {
    Converged,
    IterationCap,
    LineSearchFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverEvent {
    /// The two-loop recursion produced a non-finite direction; memory was cleared.
    MemoryReset,
    /// The quasi-Newton direction was not a descent direction; `−g` was used.
    NonDescentFallback,
}

/// Iterate plus curvature memory; owned by one outer loop.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub memory: LbfgsMemory,
    pub x_current: Vec<f64>,
    pub last_gradient: Option<Vec<f64>>,
    pub events: Vec<SolverEvent>,
}

impl SolverState {
    pub fn new(x0: Vec<f64>, memory: usize) -> Self {
        Self { memory: LbfgsMemory::new(memory), x_current: x0, last_gradient: None, events: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub p: Vec<f64>,
    /// True when `p = −g` was returned instead of the quasi-Newton direction.
    pub fallback: bool,
}

/// L-BFGS search direction `p = −H g`.
///
/// With empty memory this is exactly `−g`. A non-finite result clears the
/// memory and falls back to `−g`; so does a result with `pᵀg ≥ 0`.
pub fn two_loop_direction(state: &mut SolverState, g: &[f64]) -> Direction {
    let steepest = || g.iter().map(|v| -v).collect::<Vec<f64>>();
    if state.memory.is_empty() {
        return Direction { p: steepest(), fallback: false };
    }
    let mut p = state.memory.apply_inverse_hessian(g);
    for v in p.iter_mut() {
        *v = -*v;
    }
    if !all_finite(&p) {
        state.memory.clear();
        state.events.push(SolverEvent::MemoryReset);
        return Direction { p: steepest(), fallback: true };
    }
    if !(dot(&p, g) < 0.0) {
        state.events.push(SolverEvent::NonDescentFallback);
        return Direction { p: steepest(), fallback: true };
    }
    Direction { p, fallback: false }
}

/// One accepted inner step, logged so the Armijo condition can be re-checked.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedStep {
    pub alpha: f64,
    pub f_before: f64,
    pub f_after: f64,
    /// `pᵀg` at the start of the step.
    pub slope: f64,
    pub fallback: bool,
}

impl AcceptedStep {
    pub fn satisfies_armijo(&self, c_armijo: f64) -> bool {
        self.f_after <= self.f_before + c_armijo * self.alpha * self.slope
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    pub x_out: Vec<f64>,
    pub value_out: f64,
    pub grad_norm_out: f64,
    pub inner_iterations: usize,
    /// Calls to `value_grad` (including the initial one).
    pub gradient_evaluations: usize,
    /// Function-only calls made by the line search.
    pub function_evaluations: usize,
    pub status: InnerStatus,
    pub steps: Vec<AcceptedStep>,
}

/// Iterates from `state.x_current` until `‖∇f(x)‖ ≤ epsilon` or a cap trips.
///
/// The termination test precedes any step, so a feasible start costs one
/// gradient evaluation. Accepted pairs `(s, y)` are appended to the memory,
/// which is left in place for the next call.
pub fn solve_to_tolerance<P: Objective + ?Sized>(
    problem: &mut P,
    state: &mut SolverState,
    epsilon: f64,
    cfg: &InnerConfig,
) -> Result<InnerResult> {
    if !(epsilon > 0.0) {
        return Err(contract(format!("tolerance must be positive, got {epsilon}")));
    }
    let d = problem.dimension();
    check_dim(d, state.x_current.len())?;
    cfg.line_search.validate()?;
    let cap = cfg.cap_for(d);

    let mut x = state.x_current.clone();
    let (mut f, mut g) = problem.value_grad(&x)?;
    let mut gradient_evaluations = 1;
    let mut function_evaluations = 0;
    let mut steps = Vec::new();

    let status = loop {
        if norm(&g) <= epsilon {
            break InnerStatus::Converged;
        }
        if steps.len() >= cap {
            break InnerStatus::IterationCap;
        }
        let dir = match cfg.kind {
            SolverKind::Lbfgs => two_loop_direction(state, &g),
            SolverKind::GradientDescent => Direction { p: g.iter().map(|v| -v).collect(), fallback: false },
        };
        let slope = dot(&dir.p, &g);
        if !(slope < 0.0) {
            // Only reachable when g itself is non-finite or zero-length.
            break InnerStatus::LineSearchFailure;
        }
        let outcome = backtracking_search(
            |z| {
                function_evaluations += 1;
                problem.value(z)
            },
            &x,
            f,
            &dir.p,
            &g,
            &cfg.line_search,
        )?;
        let (alpha, f_trial) = match outcome {
            LineSearchOutcome::Accepted { alpha, value, .. } => (alpha, value),
            LineSearchOutcome::Failed { .. } => break InnerStatus::LineSearchFailure,
        };
        let x_new: Vec<f64> = x.iter().zip(&dir.p).map(|(xi, pi)| xi + alpha * pi).collect();
        let (f_new, g_new) = problem.value_grad(&x_new)?;
        gradient_evaluations += 1;
        if cfg.kind == SolverKind::Lbfgs {
            state.memory.try_insert(sub(&x_new, &x), sub(&g_new, &g));
        }
        steps.push(AcceptedStep { alpha, f_before: f, f_after: f_trial, slope, fallback: dir.fallback });
        x = x_new;
        f = f_new;
        g = g_new;
    };

    let grad_norm_out = norm(&g);
    state.x_current = x.clone();
    state.last_gradient = Some(g);
    Ok(InnerResult {
        x_out: x,
        value_out: f,
        grad_norm_out,
        inner_iterations: steps.len(),
        gradient_evaluations,
        function_evaluations,
        status,
        steps,
    })
}
