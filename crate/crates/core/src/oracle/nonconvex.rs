use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{sample_rng, ProblemSpec, SampleId, SamplingMode, StochasticOracle, WorkCounter};

#[derive(Debug, Clone, PartialEq)]
pub struct NonconvexConfig {
    pub dimension: usize,
    pub seed: u64,
    /// Height `A` of the cosine ripple.
    pub amplitude: f64,
    /// Frequency `ω` of the cosine ripple.
    pub frequency: f64,
    /// Standard deviation of the Gaussian shift applied to the center.
    pub noise_std: f64,
}

impl NonconvexConfig {
    pub fn new(dimension: usize, seed: u64) -> Self {
        Self { dimension, seed, amplitude: 1.0, frequency: 3.0, noise_std: 1.0 }
    }
}

/// Separable rippled quadratic on a streaming sample space:
///
/// `F(x, ξ) = Σ_j ½ (x_j − c_j − ξ_j)² + A (1 − cos ω (x_j − c_j))`, `ξ ~ N(0, s² I)`.
///
/// Its expectation is `f(x) = Σ_j ½ u_j² + A (1 − cos ω u_j) + d s²/2` with
/// `u = x − c`, nonconvex whenever `A ω² > 1`. Every coordinate offset `u`
/// solving `u + A ω sin(ω u) = 0` gives a stationary point; `u = 0` (the
/// center `c`) is the global minimizer.
#[derive(Debug)]
pub struct Nonconvex {
    spec: ProblemSpec,
    cfg: NonconvexConfig,
    center: Vec<f64>,
    work: WorkCounter,
}

pub fn make_nonconvex_test(p: usize, seed: u64) -> Nonconvex {
    Nonconvex::new(NonconvexConfig::new(p, seed))
}

impl Nonconvex {
    pub fn new(cfg: NonconvexConfig) -> Self {
        assert!(cfg.dimension >= 1, "nonconvex test needs p >= 1");
        assert!(cfg.noise_std >= 0.0 && cfg.amplitude >= 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let center: Vec<f64> = (0..cfg.dimension).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = ProblemSpec::new(cfg.dimension, SamplingMode::Stream)
            .with_optimum(center.clone())
            .with_param("seed", cfg.seed as f64)
            .with_param("amplitude", cfg.amplitude)
            .with_param("frequency", cfg.frequency)
            .with_param("noise_std", cfg.noise_std);
        Self { spec, cfg, center, work: WorkCounter::default() }
    }

    pub fn config(&self) -> &NonconvexConfig {
        &self.cfg
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// `E‖∇F(x, ξ) − ∇f(x)‖² = d s²`.
    pub fn gradient_noise_variance(&self) -> f64 {
        self.cfg.dimension as f64 * self.cfg.noise_std * self.cfg.noise_std
    }

    /// Gradient of the expectation `f`.
    pub fn expected_gradient(&self, x: &[f64]) -> Vec<f64> {
        let (a, w) = (self.cfg.amplitude, self.cfg.frequency);
        x.iter()
            .zip(&self.center)
            .map(|(xi, ci)| {
                let u = xi - ci;
                u + a * w * (w * u).sin()
            })
            .collect()
    }

    /// All roots of `u + A ω sin(ω u) = 0`, sorted. Each root is a per-coordinate
    /// offset from the center at which the expected gradient vanishes.
    pub fn stationary_offsets(&self) -> Vec<f64> {
        let (a, w) = (self.cfg.amplitude, self.cfg.frequency);
        let h = |u: f64| u + a * w * (w * u).sin();
        let bound = a * w + 1.0;
        let steps = 20_000;
        let du = 2.0 * bound / steps as f64;
        let mut roots = vec![0.0];
        for i in 0..steps {
            let (mut lo, mut hi) = (-bound + i as f64 * du, -bound + (i + 1) as f64 * du);
            let (flo, fhi) = (h(lo), h(hi));
            if flo == 0.0 || flo.signum() == fhi.signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if h(mid).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            if roots.iter().all(|q: &f64| (q - r).abs() > 1e-9) {
                roots.push(r);
            }
        }
        roots.sort_by(f64::total_cmp);
        roots
    }
}

impl StochasticOracle for Nonconvex {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn sample_value_grad(&self, x: &[f64], id: SampleId, grad: &mut [f64]) -> f64 {
        let (a, w, s) = (self.cfg.amplitude, self.cfg.frequency, self.cfg.noise_std);
        let mut rng = sample_rng(self.cfg.seed, id);
        let mut value = 0.0;
        for ((g, xi), ci) in grad.iter_mut().zip(x).zip(&self.center) {
            let xi_noise: f64 = if s > 0.0 { s * rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
            let u = xi - ci;
            let r = u - xi_noise;
            value += 0.5 * r * r + a * (1.0 - (w * u).cos());
            *g = r + a * w * (w * u).sin();
        }
        value
    }

    fn lipschitz_bound(&self, _id: SampleId) -> Option<f64> {
        Some(1.0 + self.cfg.amplitude * self.cfg.frequency * self.cfg.frequency)
    }

    fn work(&self) -> &WorkCounter {
        &self.work
    }
}
