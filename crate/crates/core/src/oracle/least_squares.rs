use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Dataset, ProblemSpec, SampleId, SamplingMode, StochasticOracle, WorkCounter};
use crate::error::{contract, Result};
use crate::linalg::dot;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresConfig {
    pub dimension: usize,
    pub samples: usize,
    pub seed: u64,
    /// When set, covariate columns are rescaled so that the condition number
    /// of `N⁻¹XᵀX` lands at (or just above) this value.
    pub condition_target: Option<f64>,
}

impl LeastSquaresConfig {
    pub fn new(dimension: usize, samples: usize, seed: u64) -> Self {
        Self { dimension, samples, seed, condition_target: None }
    }

    pub fn with_condition_target(mut self, target: f64) -> Self {
        self.condition_target = Some(target);
        self
    }
}

/// Finite-dataset least squares, `F(β, (X, Y)) = (Y − Xᵀβ)²`.
#[derive(Debug)]
pub struct LeastSquares {
    spec: ProblemSpec,
    covariates: Vec<f64>,
    responses: Vec<f64>,
    beta_true: Option<Vec<f64>>,
    column_scales: Vec<f64>,
    condition: OnceLock<f64>,
    work: WorkCounter,
}

/// Generates `X_i ~ N(0, I_p)`, `Y_i | X_i ~ N(X_iᵀβ, 1)` with `β = (1, …, p)`.
pub fn make_least_squares(p: usize, n: usize, seed: u64) -> LeastSquares {
    LeastSquares::generate(&LeastSquaresConfig::new(p, n, seed))
}

impl LeastSquares {
    pub fn generate(cfg: &LeastSquaresConfig) -> Self {
        let (p, n) = (cfg.dimension, cfg.samples);
        assert!(p >= 1 && n >= 1, "least squares needs p >= 1 and N >= 1");
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut covariates: Vec<f64> = (0..n * p).map(|_| StandardNormal.sample(&mut rng)).collect();
        let noise: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();

        let mut column_scales = vec![1.0; p];
        let mut condition = None;
        if let Some(target) = cfg.condition_target {
            let raw = gram(&covariates, n, p);
            let (scales, achieved) = calibrate_scales(&raw, target);
            for row in covariates.chunks_exact_mut(p) {
                for (v, s) in row.iter_mut().zip(&scales) {
                    *v *= s;
                }
            }
            column_scales = scales;
            condition = Some(achieved);
        }

        let beta: Vec<f64> = (1..=p).map(|j| j as f64).collect();
        let responses = covariates
            .chunks_exact(p)
            .zip(&noise)
            .map(|(row, e)| dot(row, &beta) + e)
            .collect();

        let mut spec = ProblemSpec::new(p, SamplingMode::Finite { size: n as u64 })
            .with_param("seed", cfg.seed as f64);
        if let Some(target) = cfg.condition_target {
            spec = spec.with_param("condition_target", target);
        }
        let cell = OnceLock::new();
        if let Some(c) = condition {
            let _ = cell.set(c);
        }
        Self {
            spec,
            covariates,
            responses,
            beta_true: Some(beta),
            column_scales,
            condition: cell,
            work: WorkCounter::default(),
        }
    }

    /// Builds an oracle over a given row-major `n × p` covariate matrix.
    pub fn from_data(covariates: Vec<f64>, responses: Vec<f64>, p: usize) -> Result<Self> {
        if p == 0 || responses.is_empty() || covariates.len() != responses.len() * p {
            return Err(contract(format!(
                "least-squares data must be n x p with n >= 1, p >= 1 (got {} values, {} responses, p = {p})",
                covariates.len(),
                responses.len()
            )));
        }
        let n = responses.len();
        Ok(Self {
            spec: ProblemSpec::new(p, SamplingMode::Finite { size: n as u64 }),
            covariates,
            responses,
            beta_true: None,
            column_scales: vec![1.0; p],
            condition: OnceLock::new(),
            work: WorkCounter::default(),
        })
    }

    pub fn from_dataset(data: Dataset) -> Result<Self> {
        Self::from_data(data.features, data.response, data.feature_names.len())
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn covariate_row(&self, i: usize) -> &[f64] {
        let p = self.spec.dimension;
        &self.covariates[i * p..(i + 1) * p]
    }

    pub fn covariates(&self) -> &[f64] {
        &self.covariates
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn beta_true(&self) -> Option<&[f64]> {
        self.beta_true.as_deref()
    }

    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    /// Condition number of the observed Gram matrix `N⁻¹XᵀX`.
    pub fn gram_condition_number(&self) -> f64 {
        *self.condition.get_or_init(|| {
            let g = gram(&self.covariates, self.len(), self.spec.dimension);
            condition_number(&g)
        })
    }

    /// Largest eigenvalue of `N⁻¹XᵀX`.
    pub fn gram_max_eigenvalue(&self) -> f64 {
        let g = gram(&self.covariates, self.len(), self.spec.dimension);
        SymmetricEigen::new(g).eigenvalues.max()
    }
}

fn gram(covariates: &[f64], n: usize, p: usize) -> DMatrix<f64> {
    let x = DMatrix::from_row_slice(n, p, covariates);
    x.tr_mul(&x) / n as f64
}

fn condition_number(g: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(g.clone()).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn spread_scales(p: usize, ratio: f64) -> Vec<f64> {
    if p == 1 {
        return vec![1.0];
    }
    (0..p).map(|j| ratio.powf(-(j as f64) / (2.0 * (p - 1) as f64))).collect()
}

/// Geometric column scales from 1 down to `ratio^{-1/2}`, with `ratio`
/// tuned so the scaled Gram matrix has condition number in `[target, 1.05·target]`.
fn calibrate_scales(raw_gram: &DMatrix<f64>, target: f64) -> (Vec<f64>, f64) {
    let p = raw_gram.nrows();
    let scaled_condition = |scales: &[f64]| {
        let d = DMatrix::from_fn(p, p, |i, j| raw_gram[(i, j)] * scales[i] * scales[j]);
        condition_number(&d)
    };
    let mut ratio = target.max(1.0);
    let mut scales = spread_scales(p, ratio);
    let mut achieved = scaled_condition(&scales);
    for _ in 0..30 {
        if p == 1 || (achieved >= target && achieved <= 1.05 * target) {
            break;
        }
        ratio *= 1.02 * target / achieved;
        scales = spread_scales(p, ratio);
        achieved = scaled_condition(&scales);
    }
    (scales, achieved)
}

impl StochasticOracle for LeastSquares {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn sample_value_grad(&self, x: &[f64], id: SampleId, grad: &mut [f64]) -> f64 {
        let i = id.index as usize;
        let row = self.covariate_row(i);
        let r = self.responses[i] - dot(row, x);
        for (g, a) in grad.iter_mut().zip(row) {
            *g = -2.0 * r * a;
        }
        r * r
    }

    fn sample_value(&self, x: &[f64], id: SampleId) -> f64 {
        let i = id.index as usize;
        let r = self.responses[i] - dot(self.covariate_row(i), x);
        r * r
    }

    fn lipschitz_bound(&self, id: SampleId) -> Option<f64> {
        let row = self.covariate_row(id.index as usize);
        Some(2.0 * dot(row, row))
    }

    fn work(&self) -> &WorkCounter {
        &self.work
    }
}
