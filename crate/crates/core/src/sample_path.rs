//! Sample-path problems `f_M(x) = M⁻¹ Σ_j F(x, Y_j)` over a frozen bag of samples.
//!
//! Averages use compensated summation over fixed-size chunks that are merged
//! in chunk order, so results do not depend on how many rayon workers run.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, contract, Result};
use crate::linalg::{norm, CompensatedSum, CompensatedVec};
use crate::oracle::{derive_seed, SampleId, SamplingMode, StochasticOracle};

/// Samples per reduction chunk.
pub const REDUCTION_CHUNK: usize = 256;

const TAG_STREAM_IDS: u64 = 1;
const TAG_DRAWS: u64 = 2;

/// The frozen sample bag defining one sample-path problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    ids: Vec<SampleId>,
    generation: usize,
}

impl SampleSet {
    pub fn new(ids: Vec<SampleId>, generation: usize) -> Result<Self> {
        if ids.is_empty() {
            return Err(contract("a sample set needs at least one sample"));
        }
        Ok(Self { ids, generation })
    }

    pub fn ids(&self) -> &[SampleId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Outer iteration `k` this set was drawn for.
    pub fn generation(&self) -> usize {
        self.generation
    }
}

/// Seeded source of sample ids for one optimization run.
///
/// Finite datasets are sampled uniformly with replacement; streaming oracles
/// get consecutive fresh indices on a run-specific stream.
#[derive(Debug, Clone)]
pub struct SampleStream {
    rng: ChaCha8Rng,
    stream_seed: u64,
    next_index: u64,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, TAG_DRAWS)),
            stream_seed: derive_seed(seed, TAG_STREAM_IDS),
            next_index: 0,
        }
    }

    pub fn stream_seed(&self) -> u64 {
        self.stream_seed
    }

    fn next_ids(&mut self, mode: SamplingMode, m: usize) -> Vec<SampleId> {
        match mode {
            SamplingMode::Finite { size } => (0..m)
                .map(|_| SampleId::new(self.stream_seed, self.rng.random_range(0..size)))
                .collect(),
            SamplingMode::Stream => {
                let start = self.next_index;
                self.next_index += m as u64;
                (start..self.next_index).map(|i| SampleId::new(self.stream_seed, i)).collect()
            }
        }
    }
}

/// Draws `m` fresh samples for outer iteration `k`. The draw never sees the
/// current iterate.
pub fn draw_sample_set(
    oracle: &dyn StochasticOracle,
    m: usize,
    k: usize,
    stream: &mut SampleStream,
) -> Result<SampleSet> {
    if m == 0 {
        return Err(contract("sample size must be at least 1"));
    }
    SampleSet::new(stream.next_ids(oracle.mode(), m), k)
}

/// Grows `prev` to `m` samples by appending `m − |prev|` fresh draws.
pub fn extend_sample_set(
    oracle: &dyn StochasticOracle,
    prev: &SampleSet,
    m: usize,
    k: usize,
    stream: &mut SampleStream,
) -> Result<SampleSet> {
    if m < prev.len() {
        return Err(contract(format!("nested sample set cannot shrink from {} to {m}", prev.len())));
    }
    let mut ids = prev.ids.clone();
    ids.extend(stream.next_ids(oracle.mode(), m - prev.len()));
    SampleSet::new(ids, k)
}

/// Cumulative optimization work charged to one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkLedger {
    /// Per-sample evaluations of any kind.
    pub oracle_work: u64,
    /// Per-sample gradient evaluations.
    pub gradient_evals: u64,
}

impl WorkLedger {
    pub fn charge(&mut self, samples: u64, gradients: u64) {
        self.oracle_work += samples;
        self.gradient_evals += gradients;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePathEval {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub grad_norm: f64,
}

struct Partial {
    value: CompensatedSum,
    grad: Option<CompensatedVec>,
}

fn reduce_chunk(oracle: &dyn StochasticOracle, x: &[f64], ids: &[SampleId], with_grad: bool) -> Partial {
    let d = x.len();
    let mut value = CompensatedSum::default();
    if with_grad {
        let mut grad = CompensatedVec::zeros(d);
        let mut g = vec![0.0; d];
        for id in ids {
            value.add(oracle.sample_value_grad(x, *id, &mut g));
            grad.add(&g);
        }
        Partial { value, grad: Some(grad) }
    } else {
        for id in ids {
            value.add(oracle.sample_value(x, *id));
        }
        Partial { value, grad: None }
    }
}

/// Uncounted average of `F(x, ·)` (and optionally `∇F`) over `ids`.
pub(crate) fn average_over(
    oracle: &dyn StochasticOracle,
    ids: &[SampleId],
    x: &[f64],
    with_grad: bool,
) -> (f64, Option<Vec<f64>>) {
    let partials: Vec<Partial> = if ids.len() > REDUCTION_CHUNK {
        ids.par_chunks(REDUCTION_CHUNK)
            .map(|c| reduce_chunk(oracle, x, c, with_grad))
            .collect()
    } else {
        vec![reduce_chunk(oracle, x, ids, with_grad)]
    };
    let mut total = CompensatedSum::default();
    let mut grad = with_grad.then(|| CompensatedVec::zeros(x.len()));
    for p in &partials {
        total.merge(&p.value);
        if let (Some(acc), Some(pg)) = (grad.as_mut(), p.grad.as_ref()) {
            acc.merge(pg);
        }
    }
    let m = ids.len() as f64;
    let gradient = grad.map(|g| g.values().into_iter().map(|v| v / m).collect());
    (total.value() / m, gradient)
}

fn validate_set(oracle: &dyn StochasticOracle, set: &SampleSet, x: &[f64]) -> Result<()> {
    check_dim(oracle.dimension(), x.len())?;
    if let SamplingMode::Finite { .. } = oracle.mode() {
        for id in set.ids() {
            oracle.validate(x, *id)?;
        }
    }
    Ok(())
}

/// `f_M(x)` and `∇f_M(x)`; charges `M` samples and `M` gradients.
pub fn eval_sample_path(
    oracle: &dyn StochasticOracle,
    set: &SampleSet,
    x: &[f64],
    ledger: &mut WorkLedger,
) -> Result<SamplePathEval> {
    validate_set(oracle, set, x)?;
    let (value, gradient) = average_over(oracle, set.ids(), x, true);
    let gradient = gradient.expect("gradient requested");
    let m = set.len() as u64;
    oracle.work().record(m, m);
    ledger.charge(m, m);
    let grad_norm = norm(&gradient);
    Ok(SamplePathEval { value, gradient, grad_norm })
}

/// `f_M(x)` alone; charges `M` samples and no gradients.
pub fn eval_sample_path_value(
    oracle: &dyn StochasticOracle,
    set: &SampleSet,
    x: &[f64],
    ledger: &mut WorkLedger,
) -> Result<f64> {
    validate_set(oracle, set, x)?;
    let (value, _) = average_over(oracle, set.ids(), x, false);
    let m = set.len() as u64;
    oracle.work().record(m, 0);
    ledger.charge(m, 0);
    Ok(value)
}

/// Sample standard deviation of per-sample gradient norms `‖∇F(x, Y_i)‖`
/// over a uniformly chosen subset of `m_sigma` members of `set`.
///
/// Charges `m_sigma` samples and gradients.
pub fn estimate_grad_norm_sigma(
    oracle: &dyn StochasticOracle,
    set: &SampleSet,
    x: &[f64],
    m_sigma: usize,
    subset_seed: u64,
    ledger: &mut WorkLedger,
) -> Result<f64> {
    if m_sigma < 2 {
        return Err(contract(format!("m_sigma = {m_sigma}: sample variance needs at least 2 samples")));
    }
    if m_sigma > set.len() {
        return Err(contract(format!("m_sigma = {m_sigma} exceeds the sample set size {}", set.len())));
    }
    validate_set(oracle, set, x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(subset_seed);
    let picks = index::sample(&mut rng, set.len(), m_sigma).into_vec();
    let norms: Vec<f64> = picks
        .par_iter()
        .map(|&i| {
            let mut g = vec![0.0; x.len()];
            oracle.sample_value_grad(x, set.ids()[i], &mut g);
            norm(&g)
        })
        .collect();
    oracle.work().record(m_sigma as u64, m_sigma as u64);
    ledger.charge(m_sigma as u64, m_sigma as u64);
    Ok(sample_std(&norms))
}

fn sample_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{make_least_squares, make_nonconvex_test, LeastSquares};

    fn scalar_ls(covariates: &[f64], responses: &[f64]) -> LeastSquares {
        LeastSquares::from_data(covariates.to_vec(), responses.to_vec(), 1).unwrap()
    }

    #[test]
    fn singleton_and_deterministic_draws() {
        let ls = make_least_squares(2, 10, 1);
        let s = draw_sample_set(&ls, 1, 1, &mut SampleStream::new(3)).unwrap();
        assert_eq!(s.len(), 1);
        let a = draw_sample_set(&ls, 40, 1, &mut SampleStream::new(3)).unwrap();
        let b = draw_sample_set(&ls, 40, 1, &mut SampleStream::new(3)).unwrap();
        assert_eq!(a, b);
        assert!(draw_sample_set(&ls, 0, 1, &mut SampleStream::new(3)).is_err());
    }

    #[test]
    fn streaming_draws_are_fresh_each_time() {
        let nc = make_nonconvex_test(2, 1);
        let mut stream = SampleStream::new(5);
        let a = draw_sample_set(&nc, 4, 1, &mut stream).unwrap();
        let b = draw_sample_set(&nc, 4, 2, &mut stream).unwrap();
        assert!(a.ids().iter().all(|id| !b.ids().contains(id)));
    }

    #[test]
    fn nested_extension_keeps_prefix() {
        let ls = make_least_squares(2, 10, 1);
        let mut stream = SampleStream::new(3);
        let a = draw_sample_set(&ls, 4, 1, &mut stream).unwrap();
        let b = extend_sample_set(&ls, &a, 9, 2, &mut stream).unwrap();
        assert_eq!(&b.ids()[..4], a.ids());
        assert_eq!(b.len(), 9);
        assert!(extend_sample_set(&ls, &b, 3, 3, &mut stream).is_err());
    }

    #[test]
    fn finite_draws_are_uniform() {
        // 10⁴ draws over 10² rows: each count ~ Binomial(10⁴, 1/100).
        let ls = make_least_squares(1, 100, 1);
        let s = draw_sample_set(&ls, 10_000, 1, &mut SampleStream::new(17)).unwrap();
        let mut counts = [0u32; 100];
        for id in s.ids() {
            counts[id.index as usize] += 1;
        }
        let sd = (10_000.0f64 * 0.01 * 0.99).sqrt();
        for c in counts {
            assert!((c as f64 - 100.0).abs() <= 5.0 * sd, "count {c}");
        }
    }

    #[test]
    fn singleton_average_matches_evaluate() {
        let ls = make_least_squares(3, 10, 2);
        let set = SampleSet::new(vec![SampleId::new(0, 6)], 1).unwrap();
        let x = [0.5, -0.25, 2.0];
        let e = eval_sample_path(&ls, &set, &x, &mut WorkLedger::default()).unwrap();
        let o = ls.evaluate(&x, SampleId::new(0, 6)).unwrap();
        assert_eq!(e.value, o.value);
        assert_eq!(e.gradient, o.gradient);
    }

    #[test]
    fn value_is_the_arithmetic_mean() {
        // Per-sample losses (y − 0)² = 1, 2, 6.
        let ls = scalar_ls(&[1.0, 1.0, 1.0], &[1.0, 2f64.sqrt(), 6f64.sqrt()]);
        let ids = (0..3).map(|i| SampleId::new(0, i)).collect();
        let set = SampleSet::new(ids, 1).unwrap();
        let mut ledger = WorkLedger::default();
        let e = eval_sample_path(&ls, &set, &[0.0], &mut ledger).unwrap();
        assert!((e.value - 3.0).abs() < 1e-15);
        assert_eq!(ledger, WorkLedger { oracle_work: 3, gradient_evals: 3 });
        eval_sample_path_value(&ls, &set, &[0.0], &mut ledger).unwrap();
        assert_eq!(ledger, WorkLedger { oracle_work: 6, gradient_evals: 3 });
    }

    #[test]
    fn sigma_of_constant_norms_is_zero() {
        let ls = scalar_ls(&[1.0, -1.0, 1.0], &[1.0, -1.0, 1.0]);
        let ids = (0..3).map(|i| SampleId::new(0, i)).collect();
        let set = SampleSet::new(ids, 1).unwrap();
        let s = estimate_grad_norm_sigma(&ls, &set, &[0.0], 3, 1, &mut WorkLedger::default()).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn sigma_of_norms_one_and_three() {
        // ∇F(0) = −2y: y = −0.5, −1.5 gives norms 1 and 3; unbiased variance = 2.
        let ls = scalar_ls(&[1.0, 1.0], &[-0.5, -1.5]);
        let set = SampleSet::new(vec![SampleId::new(0, 0), SampleId::new(0, 1)], 1).unwrap();
        let mut ledger = WorkLedger::default();
        let s = estimate_grad_norm_sigma(&ls, &set, &[0.0], 2, 9, &mut ledger).unwrap();
        assert!((s * s - 2.0).abs() < 1e-14);
        assert_eq!(ledger.oracle_work, 2);
        assert!(estimate_grad_norm_sigma(&ls, &set, &[0.0], 1, 9, &mut ledger).is_err());
        assert!(estimate_grad_norm_sigma(&ls, &set, &[0.0], 3, 9, &mut ledger).is_err());
    }
}
