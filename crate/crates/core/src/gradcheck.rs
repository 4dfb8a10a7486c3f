//! Central finite-difference checks of per-sample gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::norm;
use crate::oracle::{derive_seed, ProblemSpec, SampleId, SamplingMode, StochasticOracle, WorkCounter};

/// `‖a − b‖ / max(‖a‖, ‖b‖, 1)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    diff / norm(a).max(norm(b)).max(1.0)
}

/// Central differences of `F(·, id)` with step `1e-6·max(1, |x_j|)` per coordinate.
pub fn finite_difference_gradient(oracle: &dyn StochasticOracle, x: &[f64], id: SampleId) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|j| {
            let h = 1e-6 * x[j].abs().max(1.0);
            probe[j] = x[j] + h;
            let up = oracle.sample_value(&probe, id);
            probe[j] = x[j] - h;
            let down = oracle.sample_value(&probe, id);
            probe[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckFailure {
    pub x: Vec<f64>,
    pub id: SampleId,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub checks: usize,
    pub max_rel_error: f64,
    pub failures: Vec<GradCheckFailure>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares analytic and finite-difference gradients at `pairs` random
/// points `x ~ N(0, scale²·I)` and random samples. Does not touch work counters.
pub fn random_gradient_check(
    oracle: &dyn StochasticOracle,
    pairs: usize,
    scale: f64,
    seed: u64,
    tolerance: f64,
) -> GradCheckReport {
    let d = oracle.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = derive_seed(seed, 0x6772);
    let mut max_rel_error: f64 = 0.0;
    let mut failures = Vec::new();
    let mut analytic = vec![0.0; d];
    for i in 0..pairs {
        let x: Vec<f64> = (0..d).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        let id = match oracle.mode() {
            SamplingMode::Finite { size } => SampleId::new(0, rng.random_range(0..size)),
            SamplingMode::Stream => SampleId::new(stream, i as u64),
        };
        oracle.sample_value_grad(&x, id, &mut analytic);
        let numeric = finite_difference_gradient(oracle, &x, id);
        let err = relative_error(&analytic, &numeric);
        max_rel_error = max_rel_error.max(err);
        if !(err <= tolerance) {
            failures.push(GradCheckFailure { x, id, rel_error: err });
        }
    }
    GradCheckReport { checks: pairs, max_rel_error, failures }
}

/// Wraps an oracle and reports `−∇F`; a negative control for gradient checks.
#[derive(Debug)]
pub struct NegatedGradient<O> {
    inner: O,
    work: WorkCounter,
}

impl<O> NegatedGradient<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, work: WorkCounter::default() }
    }
}

impl<O: StochasticOracle> StochasticOracle for NegatedGradient<O> {
    fn spec(&self) -> &ProblemSpec {
        self.inner.spec()
    }

    fn sample_value_grad(&self, x: &[f64], id: SampleId, grad: &mut [f64]) -> f64 {
        let v = self.inner.sample_value_grad(x, id, grad);
        grad.iter_mut().for_each(|g| *g = -*g);
        v
    }

    fn sample_value(&self, x: &[f64], id: SampleId) -> f64 {
        self.inner.sample_value(x, id)
    }

    fn work(&self) -> &WorkCounter {
        &self.work
    }
}

impl StochasticOracle for Box<dyn StochasticOracle> {
    fn spec(&self) -> &ProblemSpec {
        self.as_ref().spec()
    }

    fn sample_value_grad(&self, x: &[f64], id: SampleId, grad: &mut [f64]) -> f64 {
        self.as_ref().sample_value_grad(x, id, grad)
    }

    fn sample_value(&self, x: &[f64], id: SampleId) -> f64 {
        self.as_ref().sample_value(x, id)
    }

    fn lipschitz_bound(&self, id: SampleId) -> Option<f64> {
        self.as_ref().lipschitz_bound(id)
    }

    fn work(&self) -> &WorkCounter {
        self.as_ref().work()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{make_least_squares, make_logistic, make_nonconvex_test};

    #[test]
    fn builtin_oracles_pass() {
        let ls = make_least_squares(6, 100, 1);
        let lg = make_logistic(5, 100, 2);
        let nc = make_nonconvex_test(4, 3);
        for o in [&ls as &dyn StochasticOracle, &lg, &nc] {
            let r = random_gradient_check(o, 20, 1.0, 4, 1e-5);
            assert!(r.passed(), "max error {}", r.max_rel_error);
        }
    }

    #[test]
    fn negated_gradient_fails() {
        let bad = NegatedGradient::new(make_least_squares(4, 50, 1));
        let r = random_gradient_check(&bad, 10, 1.0, 4, 1e-5);
        assert_eq!(r.failures.len(), 10);
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(&[0.0], &[1e-9]), 1e-9);
        assert!((relative_error(&[100.0], &[101.0]) - 1.0 / 101.0).abs() < 1e-15);
    }
}
