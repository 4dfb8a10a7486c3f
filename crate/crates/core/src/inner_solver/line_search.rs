use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::linalg::dot;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineSearchParams {
    pub c_armijo: f64,
    pub backtrack_factor: f64,
    pub initial_step: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self { c_armijo: 1e-4, backtrack_factor: 0.5, initial_step: 1.0, max_backtracks: 50 }
    }
}

impl LineSearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_armijo > 0.0 && self.c_armijo < 1.0) {
            return Err(contract(format!("c_armijo = {} must lie in (0, 1)", self.c_armijo)));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(contract(format!("backtrack_factor = {} must lie in (0, 1)", self.backtrack_factor)));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(contract(format!("initial_step = {} must be positive", self.initial_step)));
        }
        if self.max_backtracks == 0 {
            return Err(contract("max_backtracks must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSearchOutcome {
    /// `value = f(x + alpha·p)`; `trials` counts function evaluations.
    Accepted { alpha: f64, value: f64, trials: usize },
    Failed { trials: usize },
}

/// Armijo backtracking: tries `α = initial_step · factor^j` for
/// `j = 0..=max_backtracks` and accepts the first with
/// `f(x + αp) ≤ f(x) + c·α·pᵀg`.
pub fn backtracking_search<F>(
    mut f: F,
    x: &[f64],
    fx: f64,
    p: &[f64],
    g: &[f64],
    params: &LineSearchParams,
) -> Result<LineSearchOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let slope = dot(p, g);
    if !(slope < 0.0) {
        return Err(contract(format!("line search needs a descent direction, got pᵀg = {slope}")));
    }
    let mut alpha = params.initial_step;
    let mut trial = vec![0.0; x.len()];
    for j in 0..=params.max_backtracks {
        for ((t, xi), pi) in trial.iter_mut().zip(x).zip(p) {
            *t = xi + alpha * pi;
        }
        let value = f(&trial)?;
        if value.is_finite() && value <= fx + params.c_armijo * alpha * slope {
            return Ok(LineSearchOutcome::Accepted { alpha, value, trials: j + 1 });
        }
        alpha *= params.backtrack_factor;
    }
    Ok(LineSearchOutcome::Failed { trials: params.max_backtracks + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_square(x: &[f64]) -> Result<f64> {
        Ok(0.5 * x[0] * x[0])
    }

    #[test]
    fn unit_step_accepted_on_half_square() {
        let out = backtracking_search(half_square, &[1.0], 0.5, &[-1.0], &[1.0], &LineSearchParams::default()).unwrap();
        assert_eq!(out, LineSearchOutcome::Accepted { alpha: 1.0, value: 0.0, trials: 1 });
    }

    #[test]
    fn backtracks_from_four_to_one() {
        // α=4: f=4.5 > 0.4996; α=2: f=0.5 > 0.4998; α=1: f=0 ≤ 0.4999.
        let params = LineSearchParams { initial_step: 4.0, ..Default::default() };
        let mut seen = Vec::new();
        let out = backtracking_search(
            |x| {
                seen.push(x[0]);
                half_square(x)
            },
            &[1.0],
            0.5,
            &[-1.0],
            &[1.0],
            &params,
        )
        .unwrap();
        assert_eq!(seen, vec![-3.0, -1.0, 0.0]);
        assert_eq!(out, LineSearchOutcome::Accepted { alpha: 1.0, value: 0.0, trials: 3 });
    }

    #[test]
    fn linear_objective_accepts_initial_step() {
        let params = LineSearchParams { initial_step: 3.0, ..Default::default() };
        let out = backtracking_search(|x| Ok(x[0]), &[2.0], 2.0, &[-1.0], &[1.0], &params).unwrap();
        assert!(matches!(out, LineSearchOutcome::Accepted { alpha, trials: 1, .. } if alpha == 3.0));
    }

    #[test]
    fn exhausted_backtracks_fail() {
        let params = LineSearchParams { max_backtracks: 3, ..Default::default() };
        let out = backtracking_search(|_| Ok(1.0), &[0.0], 0.0, &[-1.0], &[1.0], &params).unwrap();
        assert_eq!(out, LineSearchOutcome::Failed { trials: 4 });
    }

    #[test]
    fn ascent_direction_is_a_contract_violation() {
        assert!(backtracking_search(half_square, &[1.0], 0.5, &[1.0], &[1.0], &LineSearchParams::default()).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(LineSearchParams::default().validate().is_ok());
        assert!(LineSearchParams { c_armijo: 1.0, ..Default::default() }.validate().is_err());
        assert!(LineSearchParams { backtrack_factor: 0.0, ..Default::default() }.validate().is_err());
    }
}
