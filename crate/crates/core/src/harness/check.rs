use serde::Serialize;

use crate::driver::{replay_gradient_evals, replay_oracle_work, run_ra, sample_sets_for, RecordStatus, RunTrace};
use crate::error::Result;
use crate::gradcheck::random_gradient_check;
use crate::oracle::StochasticOracle;
use crate::sample_path::{eval_sample_path, WorkLedger};
use crate::schedule::{check_summability, SummabilityVerdict};

use super::config::ExperimentConfig;

pub const GRADIENT_CHECK_PAIRS: usize = 100;
pub const GRADIENT_CHECK_TOLERANCE: f64 = 1e-5;
pub const SMOKE_ITERATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.items.push(CheckItem { name: name.to_string(), passed, detail });
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in &self.items {
            writeln!(f, "[{}] {}: {}", if i.passed { "PASS" } else { "FAIL" }, i.name, i.detail)?;
        }
        Ok(())
    }
}

/// Re-evaluates `‖∇f_{M_k}(X_k)‖` on the regenerated sample sets and compares
/// it with the logged value and `ε_k`. Returns one message per violation.
pub fn replay_certificates(oracle: &dyn StochasticOracle, trace: &RunTrace, nested: bool, schedule: &crate::schedule::SampleSizeSchedule) -> Result<Vec<String>> {
    let sets = sample_sets_for(oracle, schedule, nested, trace.seed, trace.records.len())?;
    let mut scratch = WorkLedger::default();
    let mut problems = Vec::new();
    for ((rec, set), x) in trace.records.iter().zip(&sets).zip(&trace.iterates) {
        if rec.m_k != set.len() as u64 {
            problems.push(format!("k = {}: logged M_k = {} but replay drew {}", rec.k, rec.m_k, set.len()));
            continue;
        }
        if rec.status != RecordStatus::Converged {
            continue;
        }
        let norm = eval_sample_path(oracle, set, x, &mut scratch)?.grad_norm;
        let eps = rec.eps_k.unwrap_or(f64::NAN);
        if norm != rec.grad_norm_sample_path {
            problems.push(format!("k = {}: replayed norm {norm:e} differs from logged {:e}", rec.k, rec.grad_norm_sample_path));
        }
        if !(norm <= eps) {
            problems.push(format!("k = {}: replayed norm {norm:e} exceeds eps_k = {eps:e}", rec.k));
        }
    }
    Ok(problems)
}

/// Gradient checks, schedule diagnostics, and a short certified smoke run.
pub fn self_check(cfg: &ExperimentConfig) -> Result<CheckReport> {
    let mut report = CheckReport { items: Vec::new() };
    let oracle = cfg.build_oracle()?;

    let gc = random_gradient_check(
        oracle.as_ref(),
        GRADIENT_CHECK_PAIRS,
        1.0,
        cfg.base_seed,
        GRADIENT_CHECK_TOLERANCE,
    );
    report.push(
        "gradient",
        gc.passed(),
        format!(
            "{} of {} random (x, sample) pairs within relative error {:e}; max {:.3e}",
            gc.checks - gc.failures.len(),
            gc.checks,
            GRADIENT_CHECK_TOLERANCE,
            gc.max_rel_error
        ),
    );

    let ra = cfg.ra_config();
    let horizon = ra.outer_iterations.max(50);
    match check_summability(&ra.schedule, &ra.tolerance, horizon) {
        Ok(s) => {
            let verdict = match s.verdict {
                SummabilityVerdict::Summable => "summable",
                SummabilityVerdict::NumericalOnly => "numerical only",
                SummabilityVerdict::NotCertified => "not certified",
            };
            let bound = s.analytic_bound.map(|b| format!(", analytic bound {b:.6}")).unwrap_or_default();
            report.push(
                "summability",
                true,
                format!("{verdict}: sum of M_k^(-1/2) over {} iterations = {:.6}{bound}", s.horizon, s.partial_sum),
            );
        }
        Err(e) => report.push("summability", false, e.to_string()),
    }

    let mut smoke = ra.clone();
    smoke.outer_iterations = SMOKE_ITERATIONS;
    if let crate::driver::WeightRule::Custom { values } = &mut smoke.weights {
        values.truncate(SMOKE_ITERATIONS);
    }
    let x0 = cfg.initial_point(oracle.dimension())?;
    match run_ra(oracle.as_ref(), &x0, &smoke, &cfg.eval, cfg.base_seed) {
        Ok(trace) => {
            let mut problems = replay_certificates(oracle.as_ref(), &trace, smoke.nested_samples, &smoke.schedule)?;
            let logged: Vec<u64> = trace.records.iter().map(|r| r.cumulative_oracle_work).collect();
            if replay_oracle_work(&trace.records) != logged {
                problems.push("cumulative_oracle_work does not replay".into());
            }
            let logged: Vec<u64> = trace.records.iter().map(|r| r.cumulative_gradient_evals).collect();
            if replay_gradient_evals(&trace.records) != logged {
                problems.push("cumulative_gradient_evals does not replay".into());
            }
            let converged = trace.records.iter().filter(|r| r.status == RecordStatus::Converged).count();
            let detail = if problems.is_empty() {
                format!("{converged} of {SMOKE_ITERATIONS} inner solves converged; certificates and work replay")
            } else {
                problems.join("; ")
            };
            report.push("smoke run", problems.is_empty(), detail);

            let norms: Vec<f64> = trace.records.iter().filter_map(|r| r.grad_norm_true).collect();
            if let (Some(first), Some(last)) = (norms.first(), norms.last()) {
                let per_iter = (last / first).powf(1.0 / (norms.len() as f64 - 1.0).max(1.0));
                report.push(
                    "rate",
                    true,
                    format!("true gradient norm {first:.3e} -> {last:.3e}, mean ratio per iteration {per_iter:.3}"),
                );
            }
        }
        Err(e) => report.push("smoke run", false, e.to_string()),
    }
    Ok(report)
}
