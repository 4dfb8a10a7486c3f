use rand::Rng;
use rand_distr::StandardNormal;

use super::{sample_rng, ProblemSpec, SampleId, SamplingMode, StochasticOracle, WorkCounter};
use crate::error::{contract, Result};
use crate::linalg::dot;

/// Streaming quadratic `F(x, ξ) = ½ xᵀAx − bᵀx + ξᵀx`, `ξ ~ N(0, s² I)`.
///
/// With `noise_std = 0` every sample is the same deterministic function.
#[derive(Debug)]
pub struct Quadratic {
    spec: ProblemSpec,
    hessian: Vec<f64>,
    linear: Vec<f64>,
    noise_std: f64,
    seed: u64,
    work: WorkCounter,
}

impl Quadratic {
    /// `hessian` is row-major `d × d` and must be symmetric.
    pub fn new(hessian: Vec<f64>, linear: Vec<f64>, noise_std: f64, seed: u64) -> Result<Self> {
        let d = linear.len();
        if d == 0 || hessian.len() != d * d {
            return Err(contract("quadratic needs a d x d hessian and a length-d linear term"));
        }
        for i in 0..d {
            for j in 0..i {
                if hessian[i * d + j] != hessian[j * d + i] {
                    return Err(contract("quadratic hessian must be symmetric"));
                }
            }
        }
        if noise_std.is_nan() || noise_std < 0.0 {
            return Err(contract("noise_std must be nonnegative"));
        }
        let spec = ProblemSpec::new(d, SamplingMode::Stream).with_param("noise_std", noise_std);
        Ok(Self { spec, hessian, linear, noise_std, seed, work: WorkCounter::default() })
    }

    /// `½ Σ a_j x_j²` with no noise.
    pub fn diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut h = vec![0.0; d * d];
        for (j, a) in diag.iter().enumerate() {
            h[j * d + j] = *a;
        }
        Self::new(h, vec![0.0; d], 0.0, 0).expect("diagonal quadratic is well formed")
    }

    pub fn hessian_row(&self, i: usize) -> &[f64] {
        let d = self.spec.dimension;
        &self.hessian[i * d..(i + 1) * d]
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }
}

impl StochasticOracle for Quadratic {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn sample_value_grad(&self, x: &[f64], id: SampleId, grad: &mut [f64]) -> f64 {
        let d = self.spec.dimension;
        let mut value = 0.0;
        let mut rng = (self.noise_std > 0.0).then(|| sample_rng(self.seed, id));
        for i in 0..d {
            let ax = dot(self.hessian_row(i), x);
            let noise = match rng.as_mut() {
                Some(r) => self.noise_std * r.sample::<f64, _>(StandardNormal),
                None => 0.0,
            };
            grad[i] = ax - self.linear[i] + noise;
            value += 0.5 * x[i] * ax - self.linear[i] * x[i] + noise * x[i];
        }
        value
    }

    fn lipschitz_bound(&self, _id: SampleId) -> Option<f64> {
        // Frobenius norm bounds the spectral norm.
        Some(self.hessian.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    fn work(&self) -> &WorkCounter {
        &self.work
    }
}
