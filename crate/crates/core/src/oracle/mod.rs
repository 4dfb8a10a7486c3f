//! Stochastic first-order oracles.
//!
//! An oracle represents a random function family `F(·, Y)`. Each realization
//! of `Y` is addressed by a [`SampleId`]; evaluating the same id at the same
//! point always produces bit-identical output. Oracles come in two modes:
//! finite datasets, where `SampleId::index` selects a row, and infinite
//! streams, where `(stream_seed, index)` seeds a counter-based generator.

mod csv_data;
mod least_squares;
mod logistic;
mod nonconvex;
mod quadratic;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

pub use csv_data::{load_csv_dataset, Dataset};
pub use least_squares::{make_least_squares, LeastSquares, LeastSquaresConfig};
pub use logistic::{make_logistic, Logistic, LogisticConfig};
pub use nonconvex::{make_nonconvex_test, Nonconvex, NonconvexConfig};
pub use quadratic::Quadratic;

/// Identifies one realization of `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleId {
    pub stream_seed: u64,
    pub index: u64,
}

impl SampleId {
    pub fn new(stream_seed: u64, index: u64) -> Self {
        Self { stream_seed, index }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMode {
    /// Unbounded counter-based sample generation.
    Stream,
    /// A fixed dataset of `size` rows.
    Finite { size: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub mode: SamplingMode,
    pub known_optimum: Option<Vec<f64>>,
    pub generator_params: BTreeMap<String, f64>,
}

impl ProblemSpec {
    pub fn new(dimension: usize, mode: SamplingMode) -> Self {
        assert!(dimension >= 1, "problem dimension must be positive");
        if let SamplingMode::Finite { size } = mode {
            assert!(size >= 1, "finite datasets need at least one sample");
        }
        Self { dimension, mode, known_optimum: None, generator_params: BTreeMap::new() }
    }

    pub fn with_optimum(mut self, x: Vec<f64>) -> Self {
        assert_eq!(x.len(), self.dimension);
        self.known_optimum = Some(x);
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.generator_params.insert(key.to_string(), value);
        self
    }

    pub fn dataset_size(&self) -> Option<u64> {
        match self.mode {
            SamplingMode::Finite { size } => Some(size),
            SamplingMode::Stream => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutput {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Global per-oracle evaluation counters, safe to bump from many workers.
#[derive(Debug, Default)]
pub struct WorkCounter {
    samples: AtomicU64,
    gradients: AtomicU64,
}

impl WorkCounter {
    pub fn record(&self, samples: u64, gradients: u64) {
        self.samples.fetch_add(samples, Ordering::Relaxed);
        self.gradients.fetch_add(gradients, Ordering::Relaxed);
    }

    pub fn samples(&self) -> u64 {
        self.samples.load(Ordering::Relaxed)
    }

    pub fn gradients(&self) -> u64 {
        self.gradients.load(Ordering::Relaxed)
    }
}

/// A randomized function family `F(·, Y)` with analytic gradients.
///
/// Implementors provide the raw per-sample evaluation; the provided
/// [`evaluate`](StochasticOracle::evaluate) adds precondition checks and
/// work accounting. Raw methods may assume `x.len() == dimension` and a
/// valid sample id.
pub trait StochasticOracle: Send + Sync {
    fn spec(&self) -> &ProblemSpec;

    /// Writes `∇F(x, Y_id)` into `grad` and returns `F(x, Y_id)`.
    fn sample_value_grad(&self, x: &[f64], id: SampleId, grad: &mut [f64]) -> f64;

    fn sample_value(&self, x: &[f64], id: SampleId) -> f64 {
        let mut g = vec![0.0; x.len()];
        self.sample_value_grad(x, id, &mut g)
    }

    /// Analytic bound on the Lipschitz constant of `∇F(·, Y_id)`.
    fn lipschitz_bound(&self, _id: SampleId) -> Option<f64> {
        None
    }

    fn work(&self) -> &WorkCounter;

    fn dimension(&self) -> usize {
        self.spec().dimension
    }

    fn mode(&self) -> SamplingMode {
        self.spec().mode
    }

    fn validate(&self, x: &[f64], id: SampleId) -> Result<()> {
        check_dim(self.dimension(), x.len())?;
        if let SamplingMode::Finite { size } = self.mode() {
            if id.index >= size {
                return Err(Error::InvalidSample { index: id.index, size });
            }
        }
        Ok(())
    }

    /// `F(x, Y_s)` and `∇F(x, Y_s)`; counts one sample and one gradient.
    fn evaluate(&self, x: &[f64], id: SampleId) -> Result<OracleOutput> {
        self.validate(x, id)?;
        let mut gradient = vec![0.0; x.len()];
        let value = self.sample_value_grad(x, id, &mut gradient);
        self.work().record(1, 1);
        Ok(OracleOutput { value, gradient })
    }

    /// Function-only evaluation; counts one sample and no gradient.
    fn evaluate_value(&self, x: &[f64], id: SampleId) -> Result<f64> {
        self.validate(x, id)?;
        let value = self.sample_value(x, id);
        self.work().record(1, 0);
        Ok(value)
    }
}

/// SplitMix64 finalizer; used to derive independent seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix64(mix64(seed) ^ mix64(tag.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Counter-based generator for the realization `id` of a streaming oracle
/// constructed with `construction_seed`.
pub(crate) fn sample_rng(construction_seed: u64, id: SampleId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(construction_seed, id.stream_seed));
    rng.set_stream(id.index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_rng_is_counter_based() {
        use rand::Rng;
        let a: f64 = sample_rng(1, SampleId::new(2, 3)).random();
        let b: f64 = sample_rng(1, SampleId::new(2, 3)).random();
        let c: f64 = sample_rng(1, SampleId::new(2, 4)).random();
        let d: f64 = sample_rng(1, SampleId::new(3, 3)).random();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn evaluate_checks_dimension_and_range() {
        let ls = LeastSquares::from_data(vec![1.0, 2.0], vec![1.0, 0.0], 1).unwrap();
        assert!(matches!(
            ls.evaluate(&[0.0, 0.0], SampleId::new(0, 0)),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
        assert!(matches!(
            ls.evaluate(&[0.0], SampleId::new(0, 2)),
            Err(Error::InvalidSample { index: 2, size: 2 })
        ));
        assert_eq!(ls.work().samples(), 0);
        ls.evaluate(&[0.0], SampleId::new(0, 1)).unwrap();
        ls.evaluate_value(&[0.0], SampleId::new(0, 1)).unwrap();
        assert_eq!(ls.work().samples(), 2);
        assert_eq!(ls.work().gradients(), 1);
    }
}
