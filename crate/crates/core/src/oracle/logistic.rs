use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Dataset, ProblemSpec, SampleId, SamplingMode, StochasticOracle, WorkCounter};
use crate::error::{contract, Result};
use crate::linalg::dot;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticConfig {
    pub dimension: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Binary logistic regression with log-loss, labels in `{0, 1}`.
#[derive(Debug)]
pub struct Logistic {
    spec: ProblemSpec,
    covariates: Vec<f64>,
    labels: Vec<f64>,
    w_true: Option<Vec<f64>>,
    work: WorkCounter,
}

pub fn make_logistic(p: usize, n: usize, seed: u64) -> Logistic {
    Logistic::generate(&LogisticConfig { dimension: p, samples: n, seed })
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl Logistic {
    /// Covariates `N(0, I_p)`; ground truth `w ~ N(0, (4/p) I)` so logits are
    /// roughly `N(0, 4)`; labels `Bernoulli(σ(aᵀw))`.
    pub fn generate(cfg: &LogisticConfig) -> Self {
        let (p, n) = (cfg.dimension, cfg.samples);
        assert!(p >= 1 && n >= 1, "logistic regression needs p >= 1 and N >= 1");
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let scale = 2.0 / (p as f64).sqrt();
        let w_true: Vec<f64> = (0..p)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let covariates: Vec<f64> = (0..n * p).map(|_| StandardNormal.sample(&mut rng)).collect();
        let labels = covariates
            .chunks_exact(p)
            .map(|row| {
                let u: f64 = rng.random();
                if u < sigmoid(dot(row, &w_true)) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            spec: ProblemSpec::new(p, SamplingMode::Finite { size: n as u64 })
                .with_param("seed", cfg.seed as f64),
            covariates,
            labels,
            w_true: Some(w_true),
            work: WorkCounter::default(),
        }
    }

    pub fn from_data(covariates: Vec<f64>, labels: Vec<f64>, p: usize) -> Result<Self> {
        if p == 0 || labels.is_empty() || covariates.len() != labels.len() * p {
            return Err(contract("logistic data must be n x p with n >= 1, p >= 1"));
        }
        if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(contract("logistic labels must be 0 or 1"));
        }
        let n = labels.len();
        Ok(Self {
            spec: ProblemSpec::new(p, SamplingMode::Finite { size: n as u64 }),
            covariates,
            labels,
            w_true: None,
            work: WorkCounter::default(),
        })
    }

    pub fn from_dataset(data: Dataset) -> Result<Self> {
        Self::from_data(data.features, data.response, data.feature_names.len())
    }

    pub fn covariate_row(&self, i: usize) -> &[f64] {
        let p = self.spec.dimension;
        &self.covariates[i * p..(i + 1) * p]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn w_true(&self) -> Option<&[f64]> {
        self.w_true.as_deref()
    }
}

impl StochasticOracle for Logistic {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn sample_value_grad(&self, x: &[f64], id: SampleId, grad: &mut [f64]) -> f64 {
        let i = id.index as usize;
        let row = self.covariate_row(i);
        let y = self.labels[i];
        let z = dot(row, x);
        let r = sigmoid(z) - y;
        for (g, a) in grad.iter_mut().zip(row) {
            *g = r * a;
        }
        softplus(z) - y * z
    }

    fn sample_value(&self, x: &[f64], id: SampleId) -> f64 {
        let i = id.index as usize;
        let z = dot(self.covariate_row(i), x);
        softplus(z) - self.labels[i] * z
    }

    fn lipschitz_bound(&self, id: SampleId) -> Option<f64> {
        let row = self.covariate_row(id.index as usize);
        Some(0.25 * dot(row, row))
    }

    fn work(&self) -> &WorkCounter {
        &self.work
    }
}
